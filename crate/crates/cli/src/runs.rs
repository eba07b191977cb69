//! Scenario implementations: single runs, figure sweeps, and the
//! self-convergence check.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde_json::json;
use tg_sta::{
    density_mf, density_overlap, density_tg, energy_mf, evolve_mf, evolve_orbitals,
    gaussian_integrals, ground_orbitals, ground_state_mf, many_body_fidelity, recommended_dt,
    tf_chemical_potential, tf_density, tf_integrals, Error, Grid64, Integrals64, MeanField64,
    Orbitals64, Ramp64, Result, Trap64,
};

use crate::config::{ramp_names, RampName, RunConfig};
use crate::output::{self, SummaryRow};

/// Relative |Delta fidelity| / |Delta overlap| bound for `converge`.
const CONVERGE_TOL: f64 = 1e-3;
/// Sample count for ramp schedule tables.
const RAMP_SAMPLES: usize = 400;

pub struct Context {
    pub cfg: RunConfig,
    pub out: PathBuf,
}

/// Ground states are shared across a sweep; keyed by exact parameter bits.
#[derive(Default)]
struct GroundCache {
    mf: Mutex<HashMap<(u64, u64), MeanField64>>,
    orbitals: Mutex<HashMap<(u64, u64), Orbitals64>>,
}

impl Context {
    pub fn new(cfg: RunConfig, out: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&out)?;
        Ok(Self { cfg, out })
    }

    fn grid(&self) -> Result<Arc<Grid64>> {
        Ok(Arc::new(Grid64::new(
            self.cfg.x_min,
            self.cfg.x_max,
            self.cfg.n_points,
        )?))
    }

    fn single_t_f(&self) -> Result<f64> {
        self.cfg
            .t_f
            .ok_or_else(|| Error::InvalidParam("this scenario needs t_f in the config".into()))
    }

    fn dt_for(&self, grid: &Grid64, schedule: &Ramp64) -> f64 {
        self.cfg
            .dt
            .unwrap_or_else(|| recommended_dt(grid, schedule))
    }

    fn n_orbitals(&self) -> usize {
        (self.cfg.n.round() as usize).max(1)
    }

    fn mf_ground(
        &self,
        cache: &GroundCache,
        grid: &Arc<Grid64>,
        n: f64,
        omega_sq: f64,
    ) -> Result<MeanField64> {
        let key = (n.to_bits(), omega_sq.to_bits());
        if let Some(hit) = cache.mf.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let state = ground_state_mf(grid, n, omega_sq, self.cfg.gamma)?;
        cache.mf.lock().unwrap().insert(key, state.clone());
        Ok(state)
    }

    fn orbital_ground(
        &self,
        cache: &GroundCache,
        grid: &Arc<Grid64>,
        n: f64,
        omega_sq: f64,
    ) -> Result<Orbitals64> {
        let key = (n.to_bits(), omega_sq.to_bits());
        if let Some(hit) = cache.orbitals.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let n_orb = (n.round() as usize).max(1);
        let set = ground_orbitals(grid, n_orb, omega_sq, self.cfg.gamma)?;
        cache.orbitals.lock().unwrap().insert(key, set.clone());
        Ok(set)
    }

    /// Design one ramp, propagate both descriptions through it, and score
    /// the outcome against the ground states of the final trap.
    fn trajectory(
        &self,
        cache: &GroundCache,
        grid: &Arc<Grid64>,
        n: f64,
        t_f: f64,
        name: RampName,
        dt_scale: f64,
    ) -> Result<SummaryRow> {
        let cfg = &self.cfg;
        let trap = Trap64::new(cfg.omega0_sq, cfg.omegaf_sq, cfg.gamma, t_f)?;
        let schedule = name.schedule(trap, n)?;
        let dt = self.dt_for(grid, &schedule) * dt_scale;

        let start_mf = self.mf_ground(cache, grid, n, cfg.omega0_sq)?;
        let start_orb = self.orbital_ground(cache, grid, n, cfg.omega0_sq)?;
        let target_mf = self.mf_ground(cache, grid, n, cfg.omegaf_sq)?;
        let target_orb = self.orbital_ground(cache, grid, n, cfg.omegaf_sq)?;

        let final_mf = evolve_mf(start_mf, &schedule, dt)?;
        let final_orb = evolve_orbitals(start_orb, &schedule, dt)?;

        let overlap = density_overlap(&density_mf(&final_mf), &density_mf(&target_mf))?;
        let fidelity = many_body_fidelity(&final_orb, &target_orb)?;
        Ok(SummaryRow {
            t_f,
            n,
            gamma: cfg.gamma,
            omega0_sq: cfg.omega0_sq,
            omegaf_sq: cfg.omegaf_sq,
            ramp: name.label().to_string(),
            ansatz: name
                .ansatz()
                .map(|a| a.to_string())
                .unwrap_or_else(|| "none".to_string()),
            density_overlap: overlap,
            fidelity,
        })
    }

    /// Run a list of (n, t_f, ramp) jobs in parallel; output order follows
    /// input order regardless of scheduling.
    fn sweep(&self, grid: &Arc<Grid64>, jobs: &[(f64, f64, RampName)]) -> Result<Vec<SummaryRow>> {
        let cache = GroundCache::default();
        jobs.par_iter()
            .map(|&(n, t_f, name)| self.trajectory(&cache, grid, n, t_f, name, 1.0))
            .collect()
    }

    fn common_metadata(&self) -> Vec<(&'static str, String)> {
        vec![
            ("n", self.cfg.n.to_string()),
            ("gamma", self.cfg.gamma.to_string()),
            ("omega0_sq", self.cfg.omega0_sq.to_string()),
            ("omegaf_sq", self.cfg.omegaf_sq.to_string()),
            (
                "grid",
                format!(
                    "{},{},{}",
                    self.cfg.x_min, self.cfg.x_max, self.cfg.n_points
                ),
            ),
        ]
    }

    // ---- scenarios -------------------------------------------------------

    /// Ground states of the initial trap: mean-field, orbital sum, and the
    /// Thomas-Fermi profile, each as a density table.
    pub fn run_ground(&self) -> Result<()> {
        let grid = self.grid()?;
        let cfg = &self.cfg;
        let mf = ground_state_mf(&grid, cfg.n, cfg.omega0_sq, cfg.gamma)?;
        let orbitals = ground_orbitals(&grid, self.n_orbitals(), cfg.omega0_sq, cfg.gamma)?;
        let tf = tf_density(&grid, cfg.n, cfg.omega0_sq, cfg.gamma)?;
        let meta = self.common_metadata();

        let mut files = Vec::new();
        for (name, profile) in [
            ("ground_mf.csv", density_mf(&mf)),
            ("ground_orbitals.csv", density_tg(&orbitals)),
            ("ground_tf.csv", tf),
        ] {
            let path = self.out.join(name);
            let mut w = output::create(&path)?;
            profile.write_csv(&mut w, &meta)?;
            files.push(path);
        }
        let energy = energy_mf(&mf, cfg.omega0_sq, cfg.gamma);
        let mu = tf_chemical_potential(cfg.n, cfg.gamma)?;
        output::write_metadata(
            &self.out,
            "ground",
            cfg,
            json!({
                "mean_field_energy": energy,
                "orbital_energies": orbitals.energies,
                "tf_chemical_potential": mu,
            }),
            &files,
        )
    }

    /// Tabulate b(t) and omega^2(t) for every requested ramp at one t_f.
    pub fn run_ramps(&self) -> Result<()> {
        let t_f = self.single_t_f()?;
        let trap = self.cfg.trap(t_f).map_err(to_core)?;
        let mut files = Vec::new();
        let mut min_omega_sq = Vec::new();
        for name in ramp_names(&self.cfg).map_err(to_core)? {
            let schedule = name.schedule(trap, self.cfg.n)?;
            let path = self.out.join(format!("ramp_{}.csv", name.label()));
            let mut w = output::create(&path)?;
            schedule.write_csv(&mut w, RAMP_SAMPLES)?;
            let min = (0..=RAMP_SAMPLES)
                .map(|i| schedule.omega_sq(t_f * i as f64 / RAMP_SAMPLES as f64))
                .fold(f64::INFINITY, f64::min);
            min_omega_sq.push(json!({ "ramp": name.label(), "min_omega_sq": min }));
            files.push(path);
        }
        output::write_metadata(
            &self.out,
            "ramps",
            &self.cfg,
            json!({ "t_f": t_f, "schedules": min_omega_sq }),
            &files,
        )
    }

    /// Initial and target densities of all three descriptions.
    pub fn run_densities(&self) -> Result<()> {
        let grid = self.grid()?;
        let cfg = &self.cfg;
        let mut files = Vec::new();
        for (tag, omega_sq) in [("initial", cfg.omega0_sq), ("target", cfg.omegaf_sq)] {
            let mf = ground_state_mf(&grid, cfg.n, omega_sq, cfg.gamma)?;
            let orbitals = ground_orbitals(&grid, self.n_orbitals(), omega_sq, cfg.gamma)?;
            let tf = tf_density(&grid, cfg.n, omega_sq, cfg.gamma)?;
            let mut meta = self.common_metadata();
            meta.push(("trap_omega_sq", omega_sq.to_string()));
            for (name, profile) in [
                (format!("{tag}_mf.csv"), density_mf(&mf)),
                (format!("{tag}_orbitals.csv"), density_tg(&orbitals)),
                (format!("{tag}_tf.csv"), tf),
            ] {
                let path = self.out.join(name);
                let mut w = output::create(&path)?;
                profile.write_csv(&mut w, &meta)?;
                files.push(path);
            }
        }
        output::write_metadata(&self.out, "densities", cfg, json!({}), &files)
    }

    /// One full verification per requested ramp at a single t_f: evolve both
    /// descriptions and write the summary plus the final mean-field density.
    pub fn run_evolve(&self) -> Result<()> {
        let grid = self.grid()?;
        let t_f = self.single_t_f()?;
        let names = ramp_names(&self.cfg).map_err(to_core)?;
        let jobs: Vec<_> = names.iter().map(|&r| (self.cfg.n, t_f, r)).collect();
        let rows = self.sweep(&grid, &jobs)?;

        let mut files = Vec::new();
        let cache = GroundCache::default();
        for name in &names {
            let trap = self.cfg.trap(t_f).map_err(to_core)?;
            let schedule = name.schedule(trap, self.cfg.n)?;
            let dt = self.dt_for(&grid, &schedule);
            let start = self.mf_ground(&cache, &grid, self.cfg.n, self.cfg.omega0_sq)?;
            let final_mf = evolve_mf(start, &schedule, dt)?;
            let mut meta = self.common_metadata();
            meta.push(("t_f", t_f.to_string()));
            meta.push(("ramp", name.label().to_string()));
            meta.push(("dt", dt.to_string()));
            let path = self.out.join(format!("final_density_{}.csv", name.label()));
            let mut w = output::create(&path)?;
            density_mf(&final_mf).write_csv(&mut w, &meta)?;
            files.push(path);
        }
        let summary = self.out.join("summary.csv");
        let mut meta = self.common_metadata();
        meta.push(("t_f", t_f.to_string()));
        output::write_summary_csv(&summary, &meta, &rows)?;
        files.push(summary);
        output::write_metadata(
            &self.out,
            "evolve",
            &self.cfg,
            json!({ "t_f": t_f }),
            &files,
        )
    }

    /// Fidelity and density overlap against ramp duration for every
    /// requested ramp (harmonic and anharmonic presets share this shape).
    pub fn run_duration_sweep(&self, scenario: &str) -> Result<()> {
        let grid = self.grid()?;
        let names = ramp_names(&self.cfg).map_err(to_core)?;
        let t_fs = self.cfg.t_f_grid().map_err(to_core)?;
        let jobs: Vec<_> = names
            .iter()
            .flat_map(|&r| t_fs.iter().map(move |&t| (self.cfg.n, t, r)))
            .collect();
        let rows = self.sweep(&grid, &jobs)?;

        let path = self.out.join(format!("{scenario}.csv"));
        output::write_summary_csv(&path, &self.common_metadata(), &rows)?;
        let best: Vec<_> = names
            .iter()
            .map(|name| {
                let max = rows
                    .iter()
                    .filter(|r| r.ramp == name.label())
                    .map(|r| r.fidelity)
                    .fold(0.0, f64::max);
                json!({ "ramp": name.label(), "max_fidelity": max })
            })
            .collect();
        output::write_metadata(
            &self.out,
            scenario,
            &self.cfg,
            json!({ "t_f_grid": t_fs, "per_ramp": best }),
            &[path],
        )
    }

    /// Ansatz integral scalings: W, F, J, K against particle number for both
    /// ansatze at the configured gamma, against gamma for the Thomas-Fermi
    /// ansatz at the configured N, and fitted large-N slopes.
    pub fn run_fig3(&self) -> Result<()> {
        let ns = self.cfg.n_grid().map_err(to_core)?;
        let gamma = self.cfg.gamma;

        let n_path = self.out.join("fig3_vs_n.csv");
        let mut w = output::create(&n_path)?;
        for (k, v) in self.common_metadata() {
            use std::io::Write;
            writeln!(w, "# {k} = {v}")?;
        }
        {
            use std::io::Write;
            writeln!(w, "n,ansatz,w,f,j,k")?;
            for &n in &ns {
                let mut g = gaussian_integrals(n);
                g.gamma = gamma;
                let tf = tf_integrals(n, gamma)?;
                for ints in [&g, &tf] {
                    writeln!(
                        w,
                        "{n},{},{:.12e},{:.12e},{:.12e},{:.12e}",
                        ints.kind, ints.w, ints.f, ints.j, ints.k
                    )?;
                }
            }
        }

        let gammas = [0.0, 0.05, 0.1, 0.25, 0.5, 1.0];
        let g_path = self.out.join("fig3_vs_gamma.csv");
        let mut w = output::create(&g_path)?;
        {
            use std::io::Write;
            for (k, v) in self.common_metadata() {
                writeln!(w, "# {k} = {v}")?;
            }
            writeln!(w, "gamma,ansatz,w,f,j,k")?;
            for &g in &gammas {
                let tf = tf_integrals(self.cfg.n, g)?;
                writeln!(
                    w,
                    "{g},{},{:.12e},{:.12e},{:.12e},{:.12e}",
                    tf.kind, tf.w, tf.f, tf.j, tf.k
                )?;
            }
        }

        let tf_table: Result<Vec<Integrals64>> =
            ns.iter().map(|&n| tf_integrals(n, gamma)).collect();
        let tf_table = tf_table?;
        let pick = |f: fn(&Integrals64) -> f64| -> f64 {
            log_log_slope(&ns, &tf_table.iter().map(f).collect::<Vec<_>>())
        };
        let slopes = json!({
            "ansatz": "thomas-fermi",
            "gamma": gamma,
            "n_window": [ns[0], ns[ns.len() - 1]],
            "w": pick(|i| i.w),
            "f": pick(|i| i.f.abs()),
            "j": pick(|i| i.j),
            "k": pick(|i| i.k),
        });
        output::write_metadata(
            &self.out,
            "fig3",
            &self.cfg,
            json!({ "slopes": slopes, "gamma_grid": gammas }),
            &[n_path, g_path],
        )
    }

    /// Fidelity against particle number at fixed ramp durations.
    pub fn run_fig5(&self) -> Result<()> {
        let grid = self.grid()?;
        let names = ramp_names(&self.cfg).map_err(to_core)?;
        let ns = self.cfg.n_grid().map_err(to_core)?;
        let t_fs = self.cfg.t_f_grid().map_err(to_core)?;
        let mut jobs = Vec::new();
        for &r in &names {
            for &t in &t_fs {
                for &n in &ns {
                    jobs.push((n, t, r));
                }
            }
        }
        let rows = self.sweep(&grid, &jobs)?;
        let path = self.out.join("fig5.csv");
        output::write_summary_csv(&path, &self.common_metadata(), &rows)?;
        output::write_metadata(
            &self.out,
            "fig5",
            &self.cfg,
            json!({ "n_grid": ns, "t_f_grid": t_fs }),
            &[path],
        )
    }

    /// Repeat one trajectory per ramp with the grid doubled and the step
    /// halved; the run fails (non-convergence) if fidelity or overlap moves
    /// by more than the pinned tolerance.
    pub fn run_converge(&self) -> Result<()> {
        let t_f = self.single_t_f()?;
        let names = ramp_names(&self.cfg).map_err(to_core)?;
        let coarse_grid = self.grid()?;
        let fine_grid = Arc::new(Grid64::new(
            self.cfg.x_min,
            self.cfg.x_max,
            self.cfg.n_points * 2,
        )?);

        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        for name in &names {
            let cache = GroundCache::default();
            let coarse = self.trajectory(&cache, &coarse_grid, self.cfg.n, t_f, *name, 1.0)?;
            let cache = GroundCache::default();
            let fine = self.trajectory(&cache, &fine_grid, self.cfg.n, t_f, *name, 0.5)?;
            let df = (fine.fidelity - coarse.fidelity).abs();
            let dov = (fine.density_overlap - coarse.density_overlap).abs();
            worst = worst.max(df).max(dov);
            rows.push((name.label(), coarse, fine, df, dov));
        }

        let path = self.out.join("converge.csv");
        let mut w = output::create(&path)?;
        {
            use std::io::Write;
            for (k, v) in self.common_metadata() {
                writeln!(w, "# {k} = {v}")?;
            }
            writeln!(w, "# t_f = {t_f}")?;
            writeln!(w, "# tolerance = {CONVERGE_TOL}")?;
            writeln!(
                w,
                "ramp,fidelity_coarse,fidelity_fine,delta_fidelity,overlap_coarse,overlap_fine,delta_overlap"
            )?;
            for (label, c, f, df, dov) in &rows {
                writeln!(
                    w,
                    "{label},{:.12e},{:.12e},{:.3e},{:.12e},{:.12e},{:.3e}",
                    c.fidelity, f.fidelity, df, c.density_overlap, f.density_overlap, dov
                )?;
            }
        }
        output::write_metadata(
            &self.out,
            "converge",
            &self.cfg,
            json!({
                "t_f": t_f,
                "tolerance": CONVERGE_TOL,
                "worst_shift": worst,
                "converged": worst < CONVERGE_TOL,
            }),
            &[path],
        )?;
        if worst >= CONVERGE_TOL {
            return Err(Error::NonConvergence {
                what: "grid/step self-convergence",
                steps: 2,
            });
        }
        Ok(())
    }
}

fn to_core(e: crate::config::ConfigError) -> Error {
    Error::InvalidParam(e.0)
}

/// Least-squares slope of log(y) against log(x).
fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}
