//! Grid scans over the three models, with per-point error capture.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::table::{nan_cells, Cell, OutputFormat, Table};
use crate::aklt::aklt_end_correlator;
use crate::basis::{SectorBasis, SiteKind};
use crate::entanglement::{
    classify_su2_pair, concurrence_wootters, negativity, partial_concurrence, su2_reconstruct,
    Su2Reconstruction, Verdict,
};
use crate::error::{Error, Result};
use crate::lanczos::{lowest_eigenpairs, DEGENERACY_REL_TOL};
use crate::model::{
    build_blbq, build_dimer_frustrated, build_probed_heisenberg, BlbqParams,
    DimerFrustrationParams, ProbeParams,
};
use crate::observables::{correlator_set, pair_density_matrix};

/// Desk-scale caps; larger systems need `allow_large`.
const DIMER_MAX_LENGTH: usize = 24;
const SPIN1_MAX_LENGTH: usize = 16;
const PROBE_MAX_LENGTH: usize = 16;

/// One configuration drives a whole scan: the model grids, sector, solver
/// settings and output destination. Unused grids may stay empty.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub lengths: Vec<usize>,
    pub deltas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub probe_couplings: Vec<f64>,
    pub distances: Vec<usize>,
    /// Twice the conserved total S^z of the solved sector.
    pub two_sz: i64,
    /// Eigenpairs computed per grid point.
    pub k: usize,
    pub seed: u64,
    /// Bracket tolerance for threshold bisection.
    pub threshold_tol: f64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Lift the desk-scale length caps.
    pub allow_large: bool,
    /// Memory budget for the direct-address index table, in MiB.
    pub table_budget_mb: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lengths: Vec::new(),
            deltas: Vec::new(),
            alphas: Vec::new(),
            betas: Vec::new(),
            probe_couplings: Vec::new(),
            distances: Vec::new(),
            two_sz: 0,
            k: 2,
            seed: 1,
            threshold_tol: 1e-3,
            output: None,
            format: OutputFormat::Csv,
            allow_large: false,
            table_budget_mb: 512,
        }
    }
}

impl RunConfig {
    fn budget_bytes(&self) -> usize {
        self.table_budget_mb.saturating_mul(1024 * 1024)
    }

    fn require_grid<T>(&self, grid: &[T], name: &str) -> Result<()> {
        if grid.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "grid '{name}' must be non-empty"
            )));
        }
        Ok(())
    }
}

fn check_cap(length: usize, cap: usize, model: &str, allow_large: bool) -> Result<()> {
    if length > cap && !allow_large {
        return Err(Error::InvalidParameter(format!(
            "L = {length} exceeds the desk-scale cap {cap} for the {model} model; \
             set allow_large to run it anyway"
        )));
    }
    Ok(())
}

fn finish_row(mut cells: Vec<Cell>, outcome: Result<Vec<Cell>>, data_width: usize) -> Vec<Cell> {
    match outcome {
        Ok(mut data) => {
            debug_assert_eq!(data.len(), data_width);
            cells.append(&mut data);
            cells.push(Cell::Text("ok".into()));
        }
        Err(e) => {
            cells.extend(nan_cells(data_width));
            cells.push(Cell::Text(format!("error: {e}")));
        }
    }
    cells
}

/// Bases shared across the grid points of one scan, keyed by (length, two_sz).
struct BasisCache {
    map: BTreeMap<(usize, i64), Arc<SectorBasis>>,
}

impl BasisCache {
    fn build(
        kind: SiteKind,
        keys: impl IntoIterator<Item = (usize, i64)>,
        budget: usize,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (length, two_sz) in keys {
            if !map.contains_key(&(length, two_sz)) {
                let basis = SectorBasis::build_with_budget(kind, length, two_sz, budget)?;
                map.insert((length, two_sz), basis);
            }
        }
        Ok(BasisCache { map })
    }

    fn get(&self, length: usize, two_sz: i64) -> &Arc<SectorBasis> {
        &self.map[&(length, two_sz)]
    }
}

/// End-to-end concurrence scan of the dimerized-frustrated chain.
/// Columns: l, delta, alpha, e0, degeneracy, gamma_zz, concurrence, status.
pub fn scan_dimer(cfg: &RunConfig) -> Result<Table> {
    cfg.require_grid(&cfg.lengths, "lengths")?;
    cfg.require_grid(&cfg.deltas, "deltas")?;
    cfg.require_grid(&cfg.alphas, "alphas")?;
    for &l in &cfg.lengths {
        check_cap(l, DIMER_MAX_LENGTH, "dimerized", cfg.allow_large)?;
    }
    let bases = BasisCache::build(
        SiteKind::SpinHalf,
        cfg.lengths.iter().map(|&l| (l, cfg.two_sz)),
        cfg.budget_bytes(),
    )?;

    let mut points = Vec::new();
    for &l in &cfg.lengths {
        for &delta in &cfg.deltas {
            for &alpha in &cfg.alphas {
                points.push((l, delta, alpha));
            }
        }
    }

    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(l, delta, alpha)| {
            let head = vec![Cell::Int(l as i64), Cell::Float(delta), Cell::Float(alpha)];
            let data = dimer_point(cfg, &bases, l, delta, alpha);
            finish_row(head, data, 4)
        })
        .collect();

    let mut table = Table::new(vec![
        "l",
        "delta",
        "alpha",
        "e0",
        "degeneracy",
        "gamma_zz",
        "concurrence",
        "status",
    ]);
    for row in rows {
        table.push_row(row);
    }
    Ok(table)
}

fn dimer_point(
    cfg: &RunConfig,
    bases: &BasisCache,
    l: usize,
    delta: f64,
    alpha: f64,
) -> Result<Vec<Cell>> {
    let bonds = build_dimer_frustrated(&DimerFrustrationParams {
        length: l,
        delta,
        alpha,
    })?;
    let basis = bases.get(l, cfg.two_sz);
    let gm = lowest_eigenpairs(&bonds, basis, cfg.k, cfg.seed)?;
    let sel = gm.min_spin_ground_index();
    let corr = correlator_set(&gm.eigenvectors[sel], 0, l - 1)?;
    let rho = pair_density_matrix(&gm.eigenvectors[sel], 0, l - 1)?;
    let concurrence = concurrence_wootters(&rho)?;
    Ok(vec![
        Cell::Float(gm.eigenvalues[0]),
        Cell::Int(gm.degeneracy as i64),
        Cell::Float(corr.quarter_zz()),
        Cell::Float(concurrence),
    ])
}

/// Bilinear-biquadratic spin-1 scan. Columns: l, beta, e0, s_tot, zz, charge,
/// pc, negativity_rdm, negativity_su2, verdict, status.
pub fn scan_spin1(cfg: &RunConfig) -> Result<Table> {
    cfg.require_grid(&cfg.lengths, "lengths")?;
    cfg.require_grid(&cfg.betas, "betas")?;
    for &l in &cfg.lengths {
        check_cap(l, SPIN1_MAX_LENGTH, "spin-1", cfg.allow_large)?;
    }
    let bases = BasisCache::build(
        SiteKind::SpinOne,
        cfg.lengths.iter().map(|&l| (l, cfg.two_sz)),
        cfg.budget_bytes(),
    )?;

    let mut points = Vec::new();
    for &l in &cfg.lengths {
        for &beta in &cfg.betas {
            points.push((l, beta));
        }
    }

    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(l, beta)| {
            let head = vec![Cell::Int(l as i64), Cell::Float(beta)];
            let data = spin1_point(cfg, &bases, l, beta);
            finish_row(head, data, 8)
        })
        .collect();

    let mut table = Table::new(vec![
        "l",
        "beta",
        "e0",
        "s_tot",
        "zz",
        "charge",
        "pc",
        "negativity_rdm",
        "negativity_su2",
        "verdict",
        "status",
    ]);
    for row in rows {
        table.push_row(row);
    }
    Ok(table)
}

fn spin1_point(cfg: &RunConfig, bases: &BasisCache, l: usize, beta: f64) -> Result<Vec<Cell>> {
    let bonds = build_blbq(&BlbqParams { length: l, beta })?;
    let basis = bases.get(l, cfg.two_sz);
    let gm = lowest_eigenpairs(&bonds, basis, cfg.k, cfg.seed)?;
    let sel = gm.min_spin_ground_index();
    let psi = &gm.eigenvectors[sel];
    let corr = correlator_set(psi, 0, l - 1)?;
    let zz = corr.zz;
    let charge = corr.charge.expect("spin-1 chains carry a charge correlator");
    let pc = partial_concurrence(corr.quarter_zz())?;
    let rho = pair_density_matrix(psi, 0, l - 1)?;
    let n_rdm = negativity(&rho)?.max(0.0);
    let report = classify_su2_pair(zz, charge);
    Ok(vec![
        Cell::Float(gm.eigenvalues[0]),
        Cell::Float(gm.total_spin(sel)),
        Cell::Float(zz),
        Cell::Float(charge),
        Cell::Float(pc),
        Cell::Float(n_rdm),
        Cell::Float(report.negativity.unwrap_or(f64::NAN)),
        Cell::Text(report.verdict.to_string()),
    ])
}

/// Probe-to-probe concurrence scan over the periodic Heisenberg ring with two
/// attached probes. Columns: l, d, jp, e0, s_tot, degeneracy, gamma_zz,
/// concurrence, status. The degeneracy column counts ground states across the
/// 2S^z sectors {0, +2, -2}, so a triplet ground multiplet reads 3.
pub fn scan_probes(cfg: &RunConfig) -> Result<Table> {
    cfg.require_grid(&cfg.lengths, "lengths")?;
    cfg.require_grid(&cfg.distances, "distances")?;
    cfg.require_grid(&cfg.probe_couplings, "probe_couplings")?;
    for &l in &cfg.lengths {
        check_cap(l, PROBE_MAX_LENGTH, "probe", cfg.allow_large)?;
    }
    let mut keys = Vec::new();
    for &l in &cfg.lengths {
        for two_sz in [cfg.two_sz, 2, -2] {
            keys.push((l + 2, two_sz));
        }
    }
    let bases = BasisCache::build(SiteKind::SpinHalf, keys, cfg.budget_bytes())?;

    let mut points = Vec::new();
    for &l in &cfg.lengths {
        for &d in &cfg.distances {
            for &jp in &cfg.probe_couplings {
                points.push((l, d, jp));
            }
        }
    }

    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(l, d, jp)| {
            let head = vec![Cell::Int(l as i64), Cell::Int(d as i64), Cell::Float(jp)];
            let data = probe_point(cfg, &bases, l, d, jp);
            finish_row(head, data, 5)
        })
        .collect();

    let mut table = Table::new(vec![
        "l",
        "d",
        "jp",
        "e0",
        "s_tot",
        "degeneracy",
        "gamma_zz",
        "concurrence",
        "status",
    ]);
    for row in rows {
        table.push_row(row);
    }
    Ok(table)
}

fn probe_point(
    cfg: &RunConfig,
    bases: &BasisCache,
    l: usize,
    d: usize,
    jp: f64,
) -> Result<Vec<Cell>> {
    let bonds = build_probed_heisenberg(&ProbeParams {
        length: l,
        distance: d,
        probe_coupling: jp,
    })?;
    let basis = bases.get(l + 2, cfg.two_sz);
    let gm = lowest_eigenpairs(&bonds, basis, cfg.k, cfg.seed)?;
    let sel = gm.min_spin_ground_index();
    let psi = &gm.eigenvectors[sel];
    let corr = correlator_set(psi, l, l + 1)?;
    let rho = pair_density_matrix(psi, l, l + 1)?;
    let concurrence = concurrence_wootters(&rho)?;

    // Aggregate ground-state count over the 2S^z = 0, +-2 sectors: multiplet
    // members with S^z != 0 are invisible to the solved sector alone.
    let mut energies: Vec<f64> = gm.eigenvalues.clone();
    for two_sz in [2i64, -2] {
        let side = bases.get(l + 2, two_sz);
        let k = 2.min(side.len());
        let side_gm = lowest_eigenpairs(&bonds, side, k, cfg.seed)?;
        energies.extend(side_gm.eigenvalues);
    }
    let global_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = DEGENERACY_REL_TOL * global_min.abs().max(1.0);
    let degeneracy = energies.iter().filter(|e| **e - global_min <= tol).count();

    Ok(vec![
        Cell::Float(gm.eigenvalues[0]),
        Cell::Float(gm.total_spin(sel)),
        Cell::Int(degeneracy as i64),
        Cell::Float(corr.quarter_zz()),
        Cell::Float(concurrence),
    ])
}

/// Compare solver output against the closed-form end correlators at the VBS
/// point beta = 1/3. Columns: l, zz_formula, charge_formula, zz_ed, charge_ed,
/// zz_abs_err, err_bound, pc_ed, negativity_ed, status.
pub fn aklt_check(cfg: &RunConfig) -> Result<Table> {
    cfg.require_grid(&cfg.lengths, "lengths")?;
    for &l in &cfg.lengths {
        check_cap(l, SPIN1_MAX_LENGTH, "spin-1", cfg.allow_large)?;
    }
    let bases = BasisCache::build(
        SiteKind::SpinOne,
        cfg.lengths.iter().map(|&l| (l, 0)),
        cfg.budget_bytes(),
    )?;

    let rows: Vec<Vec<Cell>> = cfg
        .lengths
        .par_iter()
        .map(|&l| {
            let (zz_f, charge_f) = aklt_end_correlator(l);
            let head = vec![Cell::Int(l as i64), Cell::Float(zz_f), Cell::Float(charge_f)];
            let data = aklt_point(cfg, &bases, l, zz_f);
            finish_row(head, data, 6)
        })
        .collect();

    let mut table = Table::new(vec![
        "l",
        "zz_formula",
        "charge_formula",
        "zz_ed",
        "charge_ed",
        "zz_abs_err",
        "err_bound",
        "pc_ed",
        "negativity_ed",
        "status",
    ]);
    for row in rows {
        table.push_row(row);
    }
    Ok(table)
}

fn aklt_point(cfg: &RunConfig, bases: &BasisCache, l: usize, zz_formula: f64) -> Result<Vec<Cell>> {
    let bonds = build_blbq(&BlbqParams {
        length: l,
        beta: 1.0 / 3.0,
    })?;
    let basis = bases.get(l, 0);
    // The VBS ground state is fourfold degenerate; k >= 2 is needed to
    // resolve the singlet inside the zero sector.
    let k = cfg.k.max(2).min(basis.len());
    let gm = lowest_eigenpairs(&bonds, basis, k, cfg.seed)?;
    let sel = gm.min_spin_ground_index();
    let psi = &gm.eigenvectors[sel];
    let corr = correlator_set(psi, 0, l - 1)?;
    let charge = corr.charge.expect("spin-1 chain");
    let pc = partial_concurrence(corr.quarter_zz())?;
    let rho = pair_density_matrix(psi, 0, l - 1)?;
    let n = negativity(&rho)?.max(0.0);
    let bound = 10.0 * 3f64.powi(-(l as i32));
    Ok(vec![
        Cell::Float(corr.zz),
        Cell::Float(charge),
        Cell::Float((corr.zz - zz_formula).abs()),
        Cell::Float(bound),
        Cell::Float(pc),
        Cell::Float(n),
    ])
}

/// Classify (zz, charge) correlator pairs as entangled, separable or
/// unphysical. Columns: zz, charge, p0, p1, p2, pc, negativity, verdict.
pub fn classify_pairs(pairs: &[(f64, f64)]) -> Table {
    let mut table = Table::new(vec![
        "zz",
        "charge",
        "p0",
        "p1",
        "p2",
        "pc",
        "negativity",
        "verdict",
    ]);
    for &(zz, charge) in pairs {
        let report = classify_su2_pair(zz, charge);
        let weights = match su2_reconstruct(zz, charge) {
            Su2Reconstruction::Physical(s) => s.weights(),
            Su2Reconstruction::Unphysical { weights } => weights,
        };
        let pc_cell = match report.verdict {
            Verdict::InvalidState => Cell::Float(f64::NAN),
            _ => Cell::Float(report.partial_concurrence.unwrap_or(f64::NAN)),
        };
        table.push_row(vec![
            Cell::Float(zz),
            Cell::Float(charge),
            Cell::Float(weights[0]),
            Cell::Float(weights[1]),
            Cell::Float(weights[2]),
            pc_cell,
            Cell::Float(report.negativity.unwrap_or(f64::NAN)),
            Cell::Text(report.verdict.to_string()),
        ]);
    }
    table
}
