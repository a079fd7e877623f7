//! Lowest eigenpairs of a bond-list Hamiltonian within a sector, by restarted
//! Lanczos iteration with full reorthogonalization.
//!
//! Eigenpairs are extracted one at a time, each run deflated against the
//! previously locked vectors, which keeps exactly degenerate multiplets
//! reliable: once the first copy is locked, the next run starts orthogonal to
//! it and converges to the partner. Within a degenerate group the vectors are
//! rotated to diagonalize S_tot^2 so each carries a sharp total-spin label.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::basis::{SectorBasis, SiteKind};
use crate::error::{Error, Result};
use crate::model::{total_spin_bonds, BondList, CompiledHamiltonian};
use crate::state::{axpy, dot, scale, Wavefunction, REDUCE_CHUNK};

/// Relative tolerance under which eigenvalues count as degenerate.
pub const DEGENERACY_REL_TOL: f64 = 1e-9;
/// Guaranteed residual bound: ||H v - E v|| <= RESIDUAL_TOL * max(1, |E|).
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Residual target while restarts keep making progress; eigenvector accuracy
/// of this order is what downstream density-matrix comparisons rely on.
const RESIDUAL_TIGHT: f64 = 1e-11;
/// Ritz values must move less than this (relative) between restarts.
const STAGNATION_REL_TOL: f64 = 1e-13;
/// Operator applications allowed per eigenpair before giving up.
const MATVEC_CAP: usize = 1000;
/// Krylov vectors kept per restart cycle.
const KRYLOV_BLOCK: usize = 48;
/// Best Ritz vectors carried across a restart (thick restart).
const RESTART_KEEP: usize = 6;

/// The lowest eigenpairs of one sector, with degeneracy and total-spin labels.
pub struct GroundMultiplet {
    /// Ascending converged eigenvalues.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Wavefunction>,
    /// How many eigenvalues lie within `DEGENERACY_REL_TOL` of the lowest.
    pub degeneracy: usize,
    /// <S_tot^2> per eigenvector, in spin units (sigma = 2S for spin-1/2).
    pub s_tot_squared: Vec<f64>,
    /// Lowest Ritz value after each Lanczos step of the first eigenpair.
    pub ritz_history: Vec<f64>,
    /// Total operator applications spent.
    pub matvecs: usize,
}

impl GroundMultiplet {
    /// Index of the vector with the smallest total spin inside the ground
    /// degeneracy group (the singlet when one is present).
    pub fn min_spin_ground_index(&self) -> usize {
        (0..self.degeneracy)
            .min_by(|&a, &b| self.s_tot_squared[a].total_cmp(&self.s_tot_squared[b]))
            .unwrap_or(0)
    }

    /// Total-spin quantum number s solving s(s+1) = <S_tot^2>.
    pub fn total_spin(&self, idx: usize) -> f64 {
        let x = self.s_tot_squared[idx].max(0.0);
        0.5 * ((1.0 + 4.0 * x).sqrt() - 1.0)
    }
}

/// Compute the `k` lowest eigenpairs of `bonds` restricted to `basis`.
/// Deterministic for a fixed `seed` and thread-count independent.
pub fn lowest_eigenpairs(
    bonds: &BondList,
    basis: &Arc<SectorBasis>,
    k: usize,
    seed: u64,
) -> Result<GroundMultiplet> {
    let dim = basis.len();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k > dim {
        return Err(Error::KExceedsDimension { k, dim });
    }
    let ham = CompiledHamiltonian::compile(bonds);
    if !ham.compatible_with(basis) {
        return Err(Error::BasisMismatch(
            "bond list does not match the sector basis".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut eigenvalues = Vec::with_capacity(k);
    let mut ritz_history = Vec::new();
    let mut matvecs = 0usize;

    for pair in 0..k {
        let record = pair == 0;
        let out = solve_deflated(&ham, basis, &locked, &mut rng, record)?;
        matvecs += out.matvecs;
        if record {
            ritz_history = out.history;
        }
        eigenvalues.push(out.eigenvalue);
        locked.push(out.vector);
    }

    // Deflation returns pairs in the order found; enforce ascending energies.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
    let mut vectors: Vec<Vec<f64>> = {
        let mut tagged: Vec<(usize, Vec<f64>)> = locked.into_iter().enumerate().collect();
        tagged.sort_by_key(|(i, _)| order.iter().position(|&o| o == *i).unwrap());
        tagged.into_iter().map(|(_, v)| v).collect()
    };

    let e0 = eigenvalues[0];
    let degeneracy = eigenvalues
        .iter()
        .take_while(|e| (*e - e0).abs() <= DEGENERACY_REL_TOL * e0.abs().max(1.0))
        .count();

    // S_tot^2 expectations, with an in-subspace rotation when degenerate.
    let spin_ops = SpinSquared::new(basis.site_kind(), basis.length());
    let mut s2_applied: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| spin_ops.apply(basis, v))
        .collect();
    if degeneracy > 1 {
        let g = degeneracy;
        let mut m = DMatrix::zeros(g, g);
        for r in 0..g {
            for c in 0..g {
                m[(r, c)] = dot(&vectors[r], &s2_applied[c]);
            }
        }
        let m = (&m + &m.transpose()) * 0.5;
        let (_, rot) = crate::linalg::symmetric_eigen(&m);
        let mut rotated = Vec::with_capacity(g);
        for col in 0..g {
            let mut nv = vec![0.0; dim];
            for r in 0..g {
                axpy(&mut nv, rot[(r, col)], &vectors[r]);
            }
            rotated.push(nv);
        }
        for (slot, nv) in rotated.into_iter().enumerate() {
            vectors[slot] = nv;
        }
        for slot in 0..g {
            s2_applied[slot] = spin_ops.apply(basis, &vectors[slot]);
        }
    }
    let s_tot_squared: Vec<f64> = vectors
        .iter()
        .zip(&s2_applied)
        .map(|(v, sv)| dot(v, sv))
        .collect();
    debug_assert!(s_tot_squared.iter().all(|&s| s >= -1e-9));

    let eigenvectors = vectors
        .into_iter()
        .map(|v| Wavefunction::new(basis.clone(), v))
        .collect::<Result<Vec<_>>>()?;

    Ok(GroundMultiplet {
        eigenvalues,
        eigenvectors,
        degeneracy,
        s_tot_squared,
        ritz_history,
        matvecs,
    })
}

/// <psi| S_tot^2 |psi> in spin units; psi is expected to be normalized.
pub fn s_tot_squared_expectation(psi: &Wavefunction) -> f64 {
    let basis = psi.basis();
    let ops = SpinSquared::new(basis.site_kind(), basis.length());
    let sv = ops.apply(basis, psi.amps());
    dot(psi.amps(), &sv)
}

/// S_tot^2 = c0 + c1 * sum_{i<j} (exchange term), realized through the
/// all-pairs bond list of the matching site kind.
struct SpinSquared {
    pairs: CompiledHamiltonian,
    c0: f64,
    c1: f64,
}

impl SpinSquared {
    fn new(kind: SiteKind, length: usize) -> Self {
        let bonds = total_spin_bonds(kind, length);
        let pairs = CompiledHamiltonian::compile(&bonds);
        let (c0, c1) = match kind {
            // S = sigma/2: S_tot^2 = (3/4) L + (1/2) sum sigma_i.sigma_j
            SiteKind::SpinHalf => (0.75 * length as f64, 0.5),
            SiteKind::SpinOne => (2.0 * length as f64, 2.0),
        };
        SpinSquared { pairs, c0, c1 }
    }

    fn apply(&self, basis: &SectorBasis, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        self.pairs.apply_to(basis, v, &mut out);
        scale(&mut out, self.c1);
        axpy(&mut out, self.c0, v);
        out
    }
}

struct PairOutcome {
    eigenvalue: f64,
    vector: Vec<f64>,
    history: Vec<f64>,
    matvecs: usize,
}

/// Basis carried across a thick restart: the best Ritz vectors followed by
/// the leading residual direction, all orthonormal.
struct RestartSeed {
    vectors: Vec<Vec<f64>>,
}

/// One restarted Lanczos run in the orthogonal complement of `locked`, with
/// full reorthogonalization. The projected operator is accumulated as a dense
/// symmetric matrix over the orthonormal basis, and every column is measured
/// explicitly, including the Ritz vectors a thick restart carries over, so
/// the Rayleigh-Ritz step never relies on stale values.
fn solve_deflated(
    ham: &CompiledHamiltonian,
    basis: &Arc<SectorBasis>,
    locked: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
    record_history: bool,
) -> Result<PairOutcome> {
    let dim = basis.len();
    let complement = dim - locked.len();
    let m_max = complement.min(KRYLOV_BLOCK);

    let mut seed: Option<RestartSeed> = None;
    let mut history = Vec::new();
    let mut theta_prev = f64::NAN;
    let mut matvecs = 0usize;
    let mut best_residual = f64::INFINITY;
    let mut residual_prev = f64::INFINITY;
    let mut stalled_cycles = 0usize;

    loop {
        let mut vs = match seed.take() {
            None => vec![random_unit_vector(rng, dim, locked)?],
            Some(s) => s.vectors,
        };
        let mut t = DMatrix::<f64>::zeros(m_max, m_max);
        let mut processed = 0usize;
        let mut breakdown = false;

        while processed < m_max && processed < complement {
            let q = processed;
            let mut w = vec![0.0; dim];
            ham.apply_to(basis, &vs[q], &mut w);
            matvecs += 1;
            // Full reorthogonalization against the locked eigenvectors and
            // the whole current basis. Passes repeat while the norm keeps
            // collapsing, so the leak left after normalization stays at
            // machine level even when the remainder is tiny; a single pass
            // would let locked components regrow geometrically across steps.
            // The summed coefficients are the projected-operator column
            // <v_i | H | v_q>.
            let mut col = vec![0.0; vs.len()];
            let mut norm_before = dot(&w, &w).sqrt();
            let mut independent = false;
            for _ in 0..3 {
                let cl = multi_dot(&w, locked);
                fused_subtract(&mut w, locked, &cl);
                let cv = multi_dot(&w, &vs);
                fused_subtract(&mut w, &vs, &cv);
                for (acc, c) in col.iter_mut().zip(&cv) {
                    *acc += c;
                }
                let after = dot(&w, &w).sqrt();
                if after > 0.5 * norm_before {
                    independent = true;
                    break;
                }
                norm_before = after;
            }
            for (i, &h_elem) in col.iter().enumerate() {
                t[(i, q)] = h_elem;
                t[(q, i)] = h_elem;
            }
            processed += 1;

            if record_history {
                history.push(lowest_eigenvalue(&t, processed));
            }

            if q + 1 == vs.len() {
                // Last existing column: the remainder extends the Krylov
                // chain. A dependent remainder means the space closed.
                let beta = dot(&w, &w).sqrt();
                let diag_scale = t[(q, q)].abs().max(1.0);
                if !independent || beta <= 1e-13 * diag_scale {
                    breakdown = true;
                    break;
                }
                if processed < m_max && processed < complement {
                    scale(&mut w, 1.0 / beta);
                    vs.push(w);
                }
            }
            // Columns of carried-over Ritz vectors discard their remainder;
            // their couplings live in the measured matrix.
        }
        vs.truncate(processed);

        // Ritz pairs of the processed block, ascending.
        let block = t.view((0, 0), (processed, processed)).into_owned();
        let (_, ritz_vectors) = crate::linalg::symmetric_eigen(&block);

        let ritz_vector = |col: usize| -> Vec<f64> {
            let mut x = vec![0.0; dim];
            for i in 0..processed {
                axpy(&mut x, ritz_vectors[(i, col)], &vs[i]);
            }
            x
        };

        let mut x = ritz_vector(0);
        project_out(&mut x, locked);
        let nx = dot(&x, &x).sqrt();
        if nx == 0.0 {
            return Err(Error::NoConvergence {
                matvecs,
                residuals: vec![f64::INFINITY],
            });
        }
        scale(&mut x, 1.0 / nx);

        // Explicit residual check on the candidate.
        let mut hx = vec![0.0; dim];
        ham.apply_to(basis, &x, &mut hx);
        matvecs += 1;
        let theta = dot(&x, &hx);
        axpy(&mut hx, -theta, &x);
        let residual = dot(&hx, &hx).sqrt();
        best_residual = best_residual.min(residual);

        let scale_t = theta.abs().max(1.0);
        let stagnant = (theta - theta_prev).abs() <= STAGNATION_REL_TOL * scale_t;
        let exhausted = processed >= complement;
        if residual > 0.5 * residual_prev {
            stalled_cycles += 1;
        } else {
            stalled_cycles = 0;
        }
        // Converge to the tight target while restarts keep paying off; the
        // 1e-8 gate only applies once the residual has stopped improving or
        // the Krylov space spans the whole complement.
        if std::env::var_os("SPINCHAIN_TRACE").is_some() {
            eprintln!(
                "lanczos cycle: dim={dim} locked={} processed={processed} theta={theta:.15} \
                 residual={residual:e} stagnant={stagnant} stalled={stalled_cycles} \
                 breakdown={breakdown} exhausted={exhausted}",
                locked.len()
            );
        }
        let accept = (stagnant && residual <= RESIDUAL_TIGHT * scale_t)
            || (exhausted && residual <= RESIDUAL_TOL * scale_t)
            || (stagnant && stalled_cycles >= 2 && residual <= RESIDUAL_TOL * scale_t);
        if accept {
            return Ok(PairOutcome {
                eigenvalue: theta,
                vector: x,
                history,
                matvecs,
            });
        }
        if matvecs >= MATVEC_CAP {
            return Err(Error::NoConvergence {
                matvecs,
                residuals: vec![best_residual],
            });
        }
        theta_prev = theta;
        residual_prev = residual;

        seed = if breakdown || exhausted {
            // The Krylov space closed on itself without meeting the target:
            // restart fresh (a random vector regains missing components).
            None
        } else {
            // Keep the best Ritz vectors and continue the Krylov growth from
            // the residual of the leading one, hx = (H - theta) x.
            let keep = RESTART_KEEP.min(processed.saturating_sub(1)).max(1);
            let mut kept = Vec::with_capacity(keep + 1);
            kept.push(x);
            for col in 1..keep {
                kept.push(ritz_vector(col));
            }
            let mut next = hx;
            if robust_orthonormalize(&mut next, locked, &kept) {
                kept.push(next);
                Some(RestartSeed { vectors: kept })
            } else {
                None
            }
        };
    }
}

/// Orthonormalize `w` against both vector sets with repeated passes; returns
/// false when `w` is numerically contained in their span.
fn robust_orthonormalize(w: &mut [f64], set_a: &[Vec<f64>], set_b: &[Vec<f64>]) -> bool {
    let mut norm_before = dot(w, w).sqrt();
    if norm_before == 0.0 {
        return false;
    }
    for _ in 0..3 {
        let ca = multi_dot(w, set_a);
        fused_subtract(w, set_a, &ca);
        let cb = multi_dot(w, set_b);
        fused_subtract(w, set_b, &cb);
        let after = dot(w, w).sqrt();
        if after > 0.5 * norm_before {
            scale(w, 1.0 / after);
            return true;
        }
        norm_before = after;
    }
    false
}

/// Random unit start vector orthogonal to the locked set.
fn random_unit_vector(
    rng: &mut ChaCha8Rng,
    dim: usize,
    locked: &[Vec<f64>],
) -> Result<Vec<f64>> {
    for _ in 0..32 {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if robust_orthonormalize(&mut v, locked, &[]) {
            return Ok(v);
        }
    }
    Err(Error::NoConvergence {
        matvecs: 0,
        residuals: vec![f64::INFINITY],
    })
}

fn project_out(w: &mut [f64], vectors: &[Vec<f64>]) {
    if vectors.is_empty() {
        return;
    }
    let coeffs = multi_dot(w, vectors);
    fused_subtract(w, vectors, &coeffs);
}

/// Dot products of `w` against every vector in `vectors`, computed chunk by
/// chunk so each chunk of `w` stays cache-hot, with deterministic reduction.
fn multi_dot(w: &[f64], vectors: &[Vec<f64>]) -> Vec<f64> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = vectors.len();
    let partials: Vec<Vec<f64>> = w
        .par_chunks(REDUCE_CHUNK)
        .enumerate()
        .map(|(ci, wc)| {
            let base = ci * REDUCE_CHUNK;
            let mut local = vec![0.0; m];
            for (vi, vect) in vectors.iter().enumerate() {
                let vc = &vect[base..base + wc.len()];
                local[vi] = wc.iter().zip(vc).map(|(a, b)| a * b).sum();
            }
            local
        })
        .collect();
    let mut out = vec![0.0; m];
    for local in &partials {
        for (o, l) in out.iter_mut().zip(local) {
            *o += l;
        }
    }
    out
}

/// w -= sum_i coeffs[i] * vectors[i], chunked like `multi_dot`.
fn fused_subtract(w: &mut [f64], vectors: &[Vec<f64>], coeffs: &[f64]) {
    if vectors.is_empty() {
        return;
    }
    w.par_chunks_mut(REDUCE_CHUNK)
        .enumerate()
        .for_each(|(ci, wc)| {
            let base = ci * REDUCE_CHUNK;
            for (vect, &c) in vectors.iter().zip(coeffs) {
                if c != 0.0 {
                    let vc = &vect[base..base + wc.len()];
                    for (a, b) in wc.iter_mut().zip(vc) {
                        *a -= c * b;
                    }
                }
            }
        });
}

/// Lowest eigenvalue of the leading `size` x `size` block of `t`.
fn lowest_eigenvalue(t: &DMatrix<f64>, size: usize) -> f64 {
    if size == 1 {
        return t[(0, 0)];
    }
    let block = t.view((0, 0), (size, size)).into_owned();
    crate::linalg::symmetric_eigenvalues(&block)[0]
}

/// Lowest energies per sector, aggregated over 2S^z in {0, +2, -2} to count
/// full multiplet sizes that a single-sector run cannot see.
pub struct SectorSpectrum {
    pub two_sz: i64,
    pub energies: Vec<f64>,
}

pub struct MultipletCount {
    pub ground_energy: f64,
    /// States within `energy_tol` of the ground energy across the sectors.
    pub count: usize,
    /// Spread max - min over the counted group.
    pub spread: f64,
    pub sectors: Vec<SectorSpectrum>,
}

pub fn multiplet_across_sectors(
    bonds: &BondList,
    k_per_sector: usize,
    seed: u64,
    energy_tol: f64,
) -> Result<MultipletCount> {
    let mut sectors = Vec::new();
    for two_sz in [0i64, 2, -2] {
        let basis = SectorBasis::build(bonds.site_kind(), bonds.length(), two_sz)?;
        let k = k_per_sector.min(basis.len());
        let solved = lowest_eigenpairs(bonds, &basis, k, seed)?;
        sectors.push(SectorSpectrum {
            two_sz,
            energies: solved.eigenvalues,
        });
    }
    let ground_energy = sectors
        .iter()
        .flat_map(|s| s.energies.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let group: Vec<f64> = sectors
        .iter()
        .flat_map(|s| s.energies.iter().copied())
        .filter(|e| e - ground_energy <= energy_tol)
        .collect();
    let spread = group.iter().copied().fold(f64::NEG_INFINITY, f64::max) - ground_energy;
    Ok(MultipletCount {
        ground_energy,
        count: group.len(),
        spread,
        sectors,
    })
}
