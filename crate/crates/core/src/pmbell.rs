//! Bridge between prepare-and-measure and phi+ Bell scenarios.
//!
//! A qubit ensemble is closed under complements (`rho -> 1 - rho`), its states
//! are read as Alice's measurements through `A_{0|x} = rho_x^T`, and the
//! resulting phi+ full correlators coincide with the single correlators of the
//! doubled prepare-and-measure scenario. Separating witnesses then carry over
//! between the PM_2 polytope and the Bell-local polytope with the same bound.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chsh::{chsh_norm_bound, optimal_alice_settings};
use crate::correlations::{phi_plus_correlator, pm_behavior, to_correlators};
use crate::gallery::pauli_eigenstate_ensemble;
use crate::polytope::{
    bell_lmo, fw_membership, pm_lmo, FwOptions, MembershipVerdict, PmOracle, PmShape, PmStrategy, Witness,
    DEFAULT_BUDGET,
};
use crate::qcore::{
    max_entangled_2, transpose, validate_assemblage, validate_ensemble, Assemblage, DichotomicMeasurement,
    Ensemble, QubitOperator, QubitState, TwoQubitOperator, VALIDITY_TOL,
};
use crate::{Error, Result};

/// Allowed gap between the PM_2 and Bell bounds of a transferred witness.
pub const BOUND_MATCH_TOL: f64 = 1e-8;

/// Originals followed by their complements `1 - rho_x`.
pub fn double_ensemble(e: &Ensemble) -> Ensemble {
    Ensemble(e.iter().copied().chain(e.iter().map(QubitState::complement)).collect())
}

/// `A_{0|x} = rho_x^T`, `A_{1|x} = 1 - rho_x^T`.
pub fn states_to_measurements(e: &Ensemble) -> Assemblage {
    Assemblage(e.iter().map(|rho| DichotomicMeasurement::new(transpose(rho.op()))).collect())
}

/// Inverse of [`states_to_measurements`]: `rho_x = (A_{0|x})^T`.
pub fn measurements_to_states(a: &Assemblage) -> Result<Ensemble> {
    let e = Ensemble(a.iter().map(|m| QubitState(transpose(&m.effect0))).collect());
    validate_ensemble(&e)?;
    Ok(e)
}

/// Largest `|C'_xy - P'_xy|` between the phi+ full correlators of the
/// transposed doubled ensemble and the single correlators of the doubled
/// PM scenario. Requires `tr(B_y) = 0`.
pub fn check_correlator_equality(e: &Ensemble, a: &Assemblage) -> Result<f64> {
    validate_ensemble(e)?;
    validate_assemblage(a)?;
    a.require_unbiased()?;
    let doubled = double_ensemble(e);
    let p = to_correlators(&pm_behavior(&doubled, a))?;
    let alice = states_to_measurements(e);
    let n = e.len();
    let mut deviation = 0.0_f64;
    for x in 0..doubled.len() {
        // Complemented rows reuse the original observable with a sign flip.
        let (obs, sign) = if x < n { (alice.0[x].observable(), 1.0) } else { (alice.0[x - n].observable(), -1.0) };
        for (y, m) in a.iter().enumerate() {
            let c = sign * phi_plus_correlator(&obs, &m.observable());
            deviation = deviation.max((c - p.get(x, y)).abs());
        }
    }
    Ok(deviation)
}

/// Rewrite a probability-space functional `sum M[x,y,b] p(b|x,y)` on
/// dichotomic outcomes as `constant + sum W_xy P_xy` on single correlators.
pub fn pm_witness_to_correlator(m: &[f64], rows: usize, cols: usize) -> Result<(Vec<f64>, f64)> {
    if m.len() != rows * cols * 2 {
        return Err(Error::Shape(format!("{} coefficients for a {rows}x{cols}x2 table", m.len())));
    }
    let w = m.chunks(2).map(|c| (c[0] - c[1]) / 2.0).collect();
    let constant = m.chunks(2).map(|c| (c[0] + c[1]) / 2.0).sum();
    Ok((w, constant))
}

/// Inverse of [`pm_witness_to_correlator`] for a zero constant: `M[x,y,b] = (-1)^b W_xy`.
pub fn correlator_to_pm_witness(w: &[f64]) -> Vec<f64> {
    w.iter().flat_map(|&c| [c, -c]).collect()
}

/// Largest `|W_{x+N,y} + W_{x,y}|` over the two halves of a doubled table.
pub fn antisymmetry_defect(w: &[f64], rows: usize, cols: usize) -> f64 {
    let n = rows / 2;
    (0..n * cols).map(|i| (w[i] + w[n * cols + i]).abs()).fold(0.0, f64::max)
}

/// `(W_x - W_{x+N}) / 2` on top, its negative below.
pub fn antisymmetrize(w: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let n = rows / 2;
    let top: Vec<f64> = (0..n * cols).map(|i| (w[i] - w[n * cols + i]) / 2.0).collect();
    top.iter().copied().chain(top.iter().map(|v| -v)).collect()
}

/// Bell witness obtained from a PM correlator witness, with both bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessTransfer {
    /// Same coefficients, `L` from the Bell-local oracle, `Q` carried over.
    pub witness: Witness,
    pub pm_bound: f64,
    pub bell_bound: f64,
}

/// Reuse a correlator witness of a doubled PM scenario as a Bell inequality.
///
/// `w.m` holds `W_xy` on the `rows x cols` single correlators (`rows = 2N`),
/// `w.q` its value on the doubled point. The Bell bound is recomputed with
/// the sign oracle and must match the PM_2 bound of the same functional.
/// The match holds for antisymmetric tables (`W_{x+N} = -W_x`), which is
/// therefore a precondition.
pub fn map_pm_witness_to_bell(w: &Witness, rows: usize, cols: usize, budget: u64) -> Result<WitnessTransfer> {
    if !rows.is_multiple_of(2) || w.m.len() != rows * cols {
        return Err(Error::Shape(format!("witness of length {} on a doubled {rows}x{cols} table", w.m.len())));
    }
    let scale = w.m.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let defect = antisymmetry_defect(&w.m, rows, cols);
    if defect > 1e-12 * scale {
        return Err(Error::NotAntisymmetric(defect));
    }
    let (_, pm_bound) = pm_lmo(&correlator_to_pm_witness(&w.m), 2, PmShape::dichotomic(rows, cols), budget)?;
    let (_, bell_bound) = bell_lmo(&w.m, rows, cols, budget)?;
    if (pm_bound - bell_bound).abs() > BOUND_MATCH_TOL {
        return Err(Error::BoundMismatch { pm: pm_bound, bell: bell_bound });
    }
    Ok(WitnessTransfer { witness: Witness { m: w.m.clone(), l: bell_bound, q: w.q }, pm_bound, bell_bound })
}

/// Violated (or tested) phi+ Bell inequality `sum W_xy C_xy <= L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellCertificate {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `W_xy`, scaled so that `L = 2` when the table is nonzero.
    pub coefficients: Vec<f64>,
    pub local_bound: f64,
    /// `Q` from the correlator table.
    pub quantum_value: f64,
    /// `Q` from the dense two-qubit Born rule.
    pub quantum_value_born: f64,
    pub violation: f64,
    /// Alice's measurements `A_{0|x} = rho_x^T`.
    pub alice: Assemblage,
    /// Witness on the full doubled table before reduction and scaling.
    pub doubled: WitnessTransfer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleSource {
    Given,
    /// States attaining the CHSH norm bound for the strongest pair.
    ChshOptimal,
    PauliEigenstates,
}

/// Ensemble used when none is supplied.
///
/// For an unbiased assemblage with at least two measurements, the pair with
/// the largest `|B0 + B1| + |B0 - B1|` (first pair on ties) supplies the two
/// states whose transposes are Alice's optimal observables. Otherwise the six
/// Pauli eigenstates.
pub fn default_certification_ensemble(a: &Assemblage) -> Result<(Ensemble, EnsembleSource)> {
    if a.len() >= 2 && a.first_biased().is_none() {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                let bound = chsh_norm_bound(&a.0[i].observable(), &a.0[j].observable());
                if best.is_none_or(|(_, _, b)| bound > b) {
                    best = Some((i, j, bound));
                }
            }
        }
        if let Some((i, j, _)) = best {
            let s = optimal_alice_settings(&a.0[i].observable(), &a.0[j].observable())?;
            let states = Ensemble(vec![
                QubitState(transpose(&DichotomicMeasurement::from_bloch(s.a0.v).effect0)),
                QubitState(transpose(&DichotomicMeasurement::from_bloch(s.a1.v).effect0)),
            ]);
            return Ok((states, EnsembleSource::ChshOptimal));
        }
    }
    Ok((pauli_eigenstate_ensemble(), EnsembleSource::PauliEigenstates))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub fw: FwOptions,
    pub budget: u64,
    /// Record wall-clock time in the report (makes reports non-reproducible).
    pub record_timing: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { fw: FwOptions::default(), budget: DEFAULT_BUDGET, record_timing: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub version: String,
    pub dimension: usize,
    pub assemblage: Assemblage,
    /// Ensemble before doubling.
    pub ensemble: Ensemble,
    pub ensemble_source: EnsembleSource,
    pub options: CertifyOptions,
    /// PM_d verdict on the doubled scenario.
    pub pm: MembershipVerdict<PmStrategy>,
    pub iterations: usize,
    pub oracle_calls: usize,
    pub distance: f64,
    pub bell: Option<BellCertificate>,
    /// Why no Bell certificate was attempted, when applicable.
    pub bell_skipped: Option<String>,
    /// Outside PM_d for some `d >= 2` rules out joint measurability, since a
    /// single qubit measurement is always simulable with two classical levels.
    pub not_jm: bool,
    pub elapsed_seconds: Option<f64>,
}

impl CertificationReport {
    pub fn verdict(&self) -> &'static str {
        self.pm.label()
    }
}

/// Doubled-ensemble PM_d test of an assemblage, with a Bell certificate at `d = 2`.
pub fn certify_incompatibility(
    a: &Assemblage,
    e: Option<&Ensemble>,
    d: usize,
    opts: &CertifyOptions,
) -> Result<CertificationReport> {
    let start = Instant::now();
    validate_assemblage(a)?;
    let (ensemble, source) = match e {
        Some(e) => {
            validate_ensemble(e)?;
            (e.clone(), EnsembleSource::Given)
        }
        None => default_certification_ensemble(a)?,
    };
    if a.is_empty() || ensemble.is_empty() {
        return Err(Error::Shape("certification needs at least one state and one measurement".into()));
    }
    let doubled = double_ensemble(&ensemble);
    let behavior = pm_behavior(&doubled, a);
    let shape = PmShape::dichotomic(doubled.len(), a.len());
    let oracle = PmOracle { d, shape, budget: opts.budget };
    let (pm, stats) = fw_membership(&behavior.data, &oracle, &opts.fw)?;

    let mut bell = None;
    let mut bell_skipped = None;
    if let Some(witness) = pm.witness() {
        if d != 2 {
            bell_skipped = Some(format!("Bell transfer applies to two-level messages, not d = {d}"));
        } else if let Some((index, _)) = a.first_biased() {
            bell_skipped = Some(format!("measurement {index} is biased"));
        } else {
            bell = Some(bell_certificate(witness, &ensemble, a, opts.budget)?);
        }
    }
    let not_jm = d >= 2 && pm.is_outside();
    Ok(CertificationReport {
        version: crate::VERSION.to_string(),
        dimension: d,
        assemblage: a.clone(),
        ensemble,
        ensemble_source: source,
        options: *opts,
        pm,
        iterations: stats.iterations,
        oracle_calls: stats.oracle_calls,
        distance: stats.distance,
        bell,
        bell_skipped,
        not_jm,
        elapsed_seconds: opts.record_timing.then(|| start.elapsed().as_secs_f64()),
    })
}

fn bell_certificate(pm_witness: &Witness, e: &Ensemble, a: &Assemblage, budget: u64) -> Result<BellCertificate> {
    let n = e.len();
    let rows = 2 * n;
    let cols = a.len();
    let (w, _) = pm_witness_to_correlator(&pm_witness.m, rows, cols)?;
    // The doubled point is antisymmetric, so symmetrising the functional
    // keeps its value on the point and cannot raise the classical bound.
    let w = antisymmetrize(&w, rows, cols);
    let doubled_point = to_correlators(&pm_behavior(&double_ensemble(e), a))?;
    let q_doubled: f64 = w.iter().zip(&doubled_point.data).map(|(x, y)| x * y).sum();
    let doubled = map_pm_witness_to_bell(&Witness { m: w.clone(), l: f64::NAN, q: q_doubled }, rows, cols, budget)?;

    let mut coefficients = w[..n * cols].to_vec();
    let (_, top_bound) = bell_lmo(&coefficients, n, cols, budget)?;
    let scale = if top_bound > VALIDITY_TOL { 2.0 / top_bound } else { 1.0 };
    coefficients.iter_mut().for_each(|c| *c *= scale);
    let local_bound = top_bound * scale;

    let alice = states_to_measurements(e);
    let mut quantum_value = 0.0;
    let mut operator = TwoQubitOperator::zero();
    for (x, ma) in alice.iter().enumerate() {
        for (y, mb) in a.iter().enumerate() {
            let c = coefficients[x * cols + y];
            quantum_value += c * phi_plus_correlator(&ma.observable(), &mb.observable());
            operator = operator + TwoQubitOperator::kron(&ma.observable(), &mb.observable()) * c;
        }
    }
    let quantum_value_born = operator.trace_product(&max_entangled_2()).re;
    Ok(BellCertificate {
        rows: n,
        cols,
        coefficients,
        local_bound,
        quantum_value,
        quantum_value_born,
        violation: quantum_value - local_bound,
        alice,
        doubled,
    })
}

/// Uniformly random pure qubit state.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R) -> QubitState {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    QubitState::from_bloch([r * phi.cos(), r * phi.sin(), z])
}

/// Pauli eigenstates (as many as fit) padded with random pure states.
pub fn seesaw_initial_ensemble<R: Rng + ?Sized>(n_states: usize, rng: &mut R) -> Ensemble {
    let mut states: Vec<QubitState> = pauli_eigenstate_ensemble().0.into_iter().take(n_states).collect();
    while states.len() < n_states {
        states.push(random_pure_state(rng));
    }
    Ensemble(states)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeesawOptions {
    pub rounds: usize,
    pub fw: FwOptions,
    pub budget: u64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self { rounds: 20, fw: FwOptions::default(), budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeesawResult {
    /// Best certified ensemble, or the last one when nothing was certified.
    pub ensemble: Ensemble,
    /// PM_d verdict for `ensemble`.
    pub verdict: MembershipVerdict<PmStrategy>,
    /// Largest certified `Q - L`; absent when no ensemble was Outside.
    pub best_gap: Option<f64>,
    pub rounds_run: usize,
}

impl SeesawResult {
    pub fn certified(&self) -> bool {
        self.best_gap.is_some()
    }
}

/// Alternate between PM_d witnesses and the states that maximise them.
///
/// Each round takes a direction `M` (the witness when Outside; otherwise the
/// witness of the behaviour pushed away from uniform, if any), replaces every
/// `rho_x` by the top eigenprojector of `sum_{y,b} M[x,y,b] B_{b|y}`, and
/// re-tests. Only Outside verdicts on actual quantum behaviours count.
pub fn seesaw_ensemble_search(a: &Assemblage, d: usize, initial: &Ensemble, opts: &SeesawOptions) -> Result<SeesawResult> {
    validate_assemblage(a)?;
    validate_ensemble(initial)?;
    let shape = PmShape::dichotomic(initial.len(), a.len());
    let oracle = PmOracle { d, shape, budget: opts.budget };
    let test = |e: &Ensemble| fw_membership(&pm_behavior(e, a).data, &oracle, &opts.fw).map(|(v, _)| v);

    let mut current = initial.clone();
    let mut verdict = test(&current)?;
    let mut best: Option<(Ensemble, MembershipVerdict<PmStrategy>, f64)> =
        verdict.witness().map(|w| (current.clone(), verdict.clone(), w.gap()));
    let mut rounds_run = 0;
    for _ in 0..opts.rounds {
        let direction = match verdict.witness() {
            Some(w) => w.m.clone(),
            None => match inflated_direction(&pm_behavior(&current, a).data, &oracle, &opts.fw)? {
                Some(m) => m,
                None => break,
            },
        };
        rounds_run += 1;
        let next = best_response(&current, a, &direction);
        let unchanged = next.iter().zip(current.iter()).all(|(p, q)| {
            let (u, v) = (p.bloch(), q.bloch());
            (0..3).all(|k| (u[k] - v[k]).abs() < 1e-13)
        });
        current = next;
        verdict = test(&current)?;
        if let Some(w) = verdict.witness() {
            if best.as_ref().is_none_or(|(_, _, g)| w.gap() > *g) {
                best = Some((current.clone(), verdict.clone(), w.gap()));
            }
        }
        if unchanged {
            break;
        }
    }
    Ok(match best {
        Some((ensemble, verdict, gap)) => SeesawResult { ensemble, verdict, best_gap: Some(gap), rounds_run },
        None => SeesawResult { ensemble: current, verdict, best_gap: None, rounds_run },
    })
}

/// Witness direction of `1/2 + t (p - 1/2)` for the smallest tried stretch
/// `t` that leaves the polytope, staying inside `[0, 1]`.
fn inflated_direction(p: &[f64], oracle: &PmOracle, fw: &FwOptions) -> Result<Option<Vec<f64>>> {
    let spread = p.iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max);
    if spread <= VALIDITY_TOL {
        return Ok(None);
    }
    let t_max = 0.5 / spread;
    let mut stretches: Vec<f64> = [1.25, 1.5, 2.0, 3.0, 5.0, 8.0].into_iter().filter(|&t| t < t_max).collect();
    if t_max > 1.0 {
        stretches.push(t_max);
    }
    for t in stretches {
        let q: Vec<f64> = p.iter().map(|v| 0.5 + t * (v - 0.5)).collect();
        let (v, _) = fw_membership(&q, oracle, fw)?;
        if let Some(w) = v.witness() {
            return Ok(Some(w.m.clone()));
        }
    }
    Ok(None)
}

/// Per-state maximiser of `sum_{y,b} M[x,y,b] tr(rho_x B_{b|y})`.
fn best_response(current: &Ensemble, a: &Assemblage, m: &[f64]) -> Ensemble {
    let n_y = a.len();
    Ensemble(
        current
            .iter()
            .enumerate()
            .map(|(x, rho)| {
                let mut w = QubitOperator::zero();
                for (y, meas) in a.iter().enumerate() {
                    for b in 0..2 {
                        w = w + meas.effect(b) * m[(x * n_y + y) * 2 + b];
                    }
                }
                let r = w.bloch_norm();
                if r <= 1e-15 {
                    *rho
                } else {
                    QubitState::from_bloch([w.v[0] / r, w.v[1] / r, w.v[2] / r])
                }
            })
            .collect(),
    )
}

/// Independent seesaw runs, one thread each.
///
/// Restart 0 starts from Pauli eigenstates padded with random pure states,
/// later restarts from random pure states only. Restart `k` draws from a
/// ChaCha stream seeded with `seed + k`, so the outcome depends only on the
/// arguments. The best certified gap wins, ties to the lowest restart.
pub fn seesaw_with_restarts(
    a: &Assemblage,
    d: usize,
    n_states: usize,
    restarts: usize,
    seed: u64,
    opts: &SeesawOptions,
) -> Result<SeesawResult> {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    if n_states == 0 || restarts == 0 {
        return Err(Error::Shape("seesaw needs at least one state and one restart".into()));
    }
    let starts: Vec<Ensemble> = (0..restarts)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            if k == 0 {
                seesaw_initial_ensemble(n_states, &mut rng)
            } else {
                Ensemble((0..n_states).map(|_| random_pure_state(&mut rng)).collect())
            }
        })
        .collect();
    let results: Vec<Result<SeesawResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> =
            starts.iter().map(|e| scope.spawn(move || seesaw_ensemble_search(a, d, e, opts))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Internal("seesaw worker panicked".into()))))
            .collect()
    });
    let mut best: Option<SeesawResult> = None;
    for r in results {
        let r = r?;
        let better = match (&best, r.best_gap) {
            (None, _) => true,
            (Some(b), Some(g)) => b.best_gap.is_none_or(|bg| g > bg),
            (Some(_), None) => false,
        };
        if better {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::Internal("no seesaw restarts ran".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{pauli_set, Axis};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::SQRT_2;

    const XYZ: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[test]
    fn doubling_examples() {
        let d = double_ensemble(&Ensemble(vec![QubitState::from_bloch([0.0, 0.0, 1.0])]));
        assert_eq!(d.0[1].bloch(), [0.0, 0.0, -1.0]);
        let d = double_ensemble(&Ensemble(vec![QubitState::maximally_mixed()]));
        assert_eq!(d.0[0], d.0[1]);
        let d = double_ensemble(&Ensemble(vec![QubitState::from_bloch([0.3, 0.1, -0.2])]));
        let b = d.0[1].bloch();
        for (got, want) in b.iter().zip([-0.3, -0.1, 0.2]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn transposition_examples() {
        let a = states_to_measurements(&Ensemble(vec![
            QubitState::from_bloch([0.0, 0.0, 1.0]),
            QubitState::from_bloch([0.0, 0.6, 0.0]),
            QubitState::maximally_mixed(),
        ]));
        assert_eq!(a.0[0].observable(), QubitOperator::pauli_z());
        assert!((a.0[1].observable().v[1] + 0.6).abs() < 1e-15);
        assert_eq!(a.0[2], DichotomicMeasurement::trivial());
        let back = measurements_to_states(&a).unwrap();
        assert!((back.0[1].bloch()[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn equality_examples() {
        let a = pauli_set(&XYZ, 1.0).unwrap();
        assert!(check_correlator_equality(&pauli_eigenstate_ensemble(), &a).unwrap() < 1e-12);
        let p = to_correlators(&pm_behavior(&pauli_eigenstate_ensemble(), &a)).unwrap();
        assert!((p.get(4, 2) - 1.0).abs() < 1e-15);
        let trivial = Ensemble(vec![QubitState::maximally_mixed(); 3]);
        assert_eq!(check_correlator_equality(&trivial, &a).unwrap(), 0.0);
        let biased = Assemblage(vec![DichotomicMeasurement::new(QubitOperator::new(0.4, [0.0, 0.0, 0.1]))]);
        assert!(matches!(check_correlator_equality(&trivial, &biased), Err(Error::Biased { .. })));
    }

    #[test]
    fn transfer_examples() {
        // CHSH on the original rows of a doubled two-state scenario.
        let chsh = [1.0, 1.0, 1.0, -1.0];
        let w: Vec<f64> = chsh.iter().copied().chain(chsh.iter().map(|v| -v)).collect();
        let t = map_pm_witness_to_bell(&Witness { m: w, l: 0.0, q: 0.0 }, 4, 2, DEFAULT_BUDGET).unwrap();
        assert!((t.pm_bound - 4.0).abs() < 1e-12 && (t.bell_bound - 4.0).abs() < 1e-12);
        let (_, reduced) = bell_lmo(&chsh, 2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(reduced, 2.0);

        let t = map_pm_witness_to_bell(&Witness { m: vec![0.0; 8], l: 0.0, q: 0.0 }, 4, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.witness.l, 0.0);
        assert_eq!(t.witness.q, 0.0);

        let not_anti = Witness { m: vec![1.0, 1.0, 1.0, -1.0], l: 0.0, q: 0.0 };
        assert!(matches!(map_pm_witness_to_bell(&not_anti, 2, 2, DEFAULT_BUDGET), Err(Error::NotAntisymmetric(_))));
    }

    #[test]
    fn correlator_witness_round_trip() {
        let w = vec![0.3, -0.7, 1.1, 0.0];
        let (back, constant) = pm_witness_to_correlator(&correlator_to_pm_witness(&w), 2, 2).unwrap();
        assert_eq!(back, w);
        assert_eq!(constant, 0.0);
    }

    #[test]
    fn certify_noisy_paulis() {
        let a = pauli_set(&XYZ, 0.75).unwrap();
        let r = certify_incompatibility(&a, None, 2, &CertifyOptions::default()).unwrap();
        assert_eq!(r.verdict(), "outside");
        assert!(r.not_jm);
        let bell = r.bell.expect("bell certificate");
        assert!((bell.local_bound - 2.0).abs() < 1e-12);
        assert!((bell.quantum_value - 2.0 * SQRT_2 * 0.75).abs() < 1e-6);
        assert!((bell.quantum_value - bell.quantum_value_born).abs() < 1e-12);

        let a = pauli_set(&XYZ, 0.70).unwrap();
        let r = certify_incompatibility(&a, None, 2, &CertifyOptions::default()).unwrap();
        assert_eq!(r.verdict(), "inside");
        assert!(r.bell.is_none() && !r.not_jm);
    }

    #[test]
    fn certify_trivial_is_inside() {
        let a = Assemblage(vec![DichotomicMeasurement::trivial(); 2]);
        for d in 1..=3 {
            let r = certify_incompatibility(&a, None, d, &CertifyOptions::default()).unwrap();
            assert!(r.pm.is_inside(), "d = {d}");
        }
    }

    #[test]
    fn seesaw_rounds_zero_and_violation() {
        let a = pauli_set(&XYZ, 0.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let start = Ensemble((0..4).map(|_| random_pure_state(&mut rng)).collect());
        let zero = SeesawOptions { rounds: 0, ..SeesawOptions::default() };
        let r = seesaw_ensemble_search(&a, 2, &start, &zero).unwrap();
        assert_eq!(r.ensemble, start);
        assert_eq!(r.rounds_run, 0);

        let r = seesaw_ensemble_search(&a, 2, &start, &SeesawOptions::default()).unwrap();
        assert!(r.best_gap.is_some_and(|g| g > 0.0), "{r:?}");
        assert!(r.verdict.is_outside());
    }

    #[test]
    fn seesaw_respects_joint_measurability() {
        let a = pauli_set(&XYZ, 0.5).unwrap();
        let r = seesaw_with_restarts(&a, 2, 6, 3, 11, &SeesawOptions { rounds: 5, ..Default::default() }).unwrap();
        assert!(!r.certified());
    }
}
