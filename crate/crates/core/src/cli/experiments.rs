use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    channel_capacity_ad, detect_revivals, witness_f_kraus, witness_from_correlators, work_bits,
    TimeSeries,
};
use crate::channels::{
    amplitude_damping_channel, c1, choi, collisional_correlated, collisional_separable,
    cp_divisibility_scan, depolarizing, gamma_ad, p_divisibility_scan_pauli, pauli_channel,
    pauli_rates_to_probabilities, pump_xx, pump_zz, ADParams, Divisibility, KrausChannel,
    PauliRates,
};
use crate::circuit::{run_exact, run_noisy, Circuit, Counts, Gate, NoiseModel};
use crate::decomp::{
    build_amplitude_damping_circuit, build_collisional_circuit, build_composed_pump_circuit,
    build_depolarizing_circuit, build_pauli_circuit, solve_pauli_angles, WitnessBasis,
};
use crate::error::{Error, Result};
use crate::qstate::{fidelity, overlap, Bell, DensityMatrix, PureState};
use crate::tomomit::{
    measure_calibration, measure_in_bases, mitigate_counts, mix_seed, tomography,
    tomography_records, Basis, CalibrationMatrix, TomographyRecord,
};

use super::{
    damping_span, uniform_grid, Experiment, ExperimentConfig, ETERNAL_SPAN, TAN_SPAN_FRACTION,
};

/// Revival tolerance used in the diagnostics block.
const REVIVAL_TOL: f64 = 1e-6;
/// Tolerance for the divisibility scans in the diagnostics block.
const SCAN_TOL: f64 = 1e-10;
/// Sub-seed stream reserved for readout calibration.
const CALIBRATION_STREAM: u64 = 0xCA1B_0000;

#[derive(Debug, Clone, Serialize)]
pub struct CircuitDump {
    pub label: String,
    pub parameter: f64,
    pub circuit: Circuit,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelDump {
    pub label: String,
    pub parameter: f64,
    pub channel: Value,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub theory: Vec<TimeSeries>,
    pub simulated: Vec<TimeSeries>,
    pub circuits: Vec<CircuitDump>,
    pub channels: Vec<ChannelDump>,
    pub diagnostics: Value,
}

impl ExperimentOutput {
    fn new() -> Self {
        Self {
            theory: Vec::new(),
            simulated: Vec::new(),
            circuits: Vec::new(),
            channels: Vec::new(),
            diagnostics: Value::Null,
        }
    }

    fn dump_circuit(&mut self, label: &str, parameter: f64, circuit: Circuit) {
        self.circuits.push(CircuitDump {
            label: label.to_string(),
            parameter,
            circuit,
        });
    }

    fn dump_channel(&mut self, label: &str, parameter: f64, channel: &KrausChannel) -> Result<()> {
        self.channels.push(ChannelDump {
            label: label.to_string(),
            parameter,
            channel: serde_json::from_str(&channel.to_json()?)?,
        });
        Ok(())
    }
}

/// Shared state for one run: resolved noise and per-point seeding.
struct Lab<'a> {
    cfg: &'a ExperimentConfig,
    noise: NoiseModel,
}

impl<'a> Lab<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Self {
        Self {
            cfg,
            noise: cfg.noise.clone().unwrap_or_else(NoiseModel::ideal),
        }
    }

    fn seed(&self, index: usize) -> u64 {
        self.cfg.seed ^ index as u64
    }

    fn calibration(&self, n: usize) -> Result<Option<CalibrationMatrix>> {
        if !self.cfg.mitigate {
            return Ok(None);
        }
        let seed = mix_seed(self.cfg.seed, CALIBRATION_STREAM + n as u64);
        measure_calibration(&self.noise, n, self.cfg.shots, seed).map(Some)
    }

    fn run(&self, circuit: &Circuit, initial: &DensityMatrix) -> Result<DensityMatrix> {
        run_noisy(circuit, initial, &self.noise)
    }

    fn measure_z(&self, state: &DensityMatrix, qubits: &[usize], seed: u64) -> Result<Counts> {
        let bases = vec![Basis::Z; qubits.len()];
        measure_in_bases(state, qubits, &bases, &self.noise, self.cfg.shots, seed)
    }

    fn tomography(
        &self,
        state: &DensityMatrix,
        qubits: &[usize],
        seed: u64,
    ) -> Result<Vec<TomographyRecord>> {
        tomography_records(state, qubits, &self.noise, self.cfg.shots, seed)
    }
}

fn distribution(counts: &Counts, bits: usize, cal: Option<&CalibrationMatrix>) -> Result<Vec<f64>> {
    match cal {
        Some(c) => Ok(mitigate_counts(counts, c)?.probabilities),
        None => Ok(counts.probabilities(bits)),
    }
}

/// ⟨Z⊗…⊗Z⟩ of a distribution over basis indices.
fn parity(dist: &[f64]) -> f64 {
    dist.iter()
        .enumerate()
        .map(|(i, p)| if i.count_ones() % 2 == 0 { *p } else { -p })
        .sum()
}

fn par_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Result<R> + Sync,
{
    items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

fn merge_counts(parts: &[Counts]) -> Result<Counts> {
    let mut table = std::collections::BTreeMap::new();
    let mut shots = 0;
    for c in parts {
        shots += c.shots;
        for (k, v) in &c.table {
            *table.entry(k.clone()).or_insert(0) += v;
        }
    }
    Counts::new(shots, table)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let cfg = cfg.resolved();
    cfg.validate()?;
    let lab = Lab::new(&cfg);
    match cfg.experiment {
        Experiment::Reservoir => reservoir(&lab),
        Experiment::Collisional => collisional(&lab),
        Experiment::AmplitudeDamping => amplitude_damping(&lab),
        Experiment::Depolarizing => depolarizing_tomography(&lab),
        Experiment::PauliWork => pauli_work(&lab),
        Experiment::Capacity => capacity(&lab),
    }
}

fn p_grid(lab: &Lab) -> Vec<f64> {
    lab.cfg.grid.p_grid.clone().unwrap_or_default()
}

fn ratios(lab: &Lab) -> Vec<f64> {
    lab.cfg.grid.ratios.clone().unwrap_or_default()
}

fn ratio_label(prefix: &str, r: f64) -> String {
    format!("{prefix} R={r}")
}

/// Overlap with |ψ−⟩ after the composed pump acting on 𝕀/4, the mixed
/// input realized by averaging the four computational-basis runs.
fn reservoir(lab: &Lab) -> Result<ExperimentOutput> {
    let ps = p_grid(lab);
    let target = PureState::bell(Bell::PsiMinus);
    let mixed = DensityMatrix::maximally_mixed(2);
    let mut out = ExperimentOutput::new();
    let mut theory = Vec::with_capacity(ps.len());
    for &p in &ps {
        let ch = pump_xx(p)?.compose(&pump_zz(p)?)?;
        theory.push(overlap(&ch.apply(&mixed)?, &target)?);
        out.dump_channel("composed pump", p, &ch)?;
        out.dump_circuit("composed pump", p, build_composed_pump_circuit(p)?);
    }
    let cal = lab.calibration(2)?;
    let simulated = par_map(&ps, |i, &p| {
        let circuit = build_composed_pump_circuit(p)?;
        let seed = lab.seed(i);
        let mut per_prep = Vec::with_capacity(4);
        for prep in 0..4 {
            let state = lab.run(&circuit, &DensityMatrix::basis(4, prep << 2)?)?;
            per_prep.push(lab.tomography(&state, &[0, 1], mix_seed(seed, prep as u64))?);
        }
        let records = (0..per_prep[0].len())
            .map(|k| {
                let parts: Vec<Counts> = per_prep.iter().map(|r| r[k].counts.clone()).collect();
                Ok(TomographyRecord {
                    bases: per_prep[0][k].bases.clone(),
                    counts: merge_counts(&parts)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        overlap(&tomography(&records, cal.as_ref())?, &target)
    })?;
    out.theory
        .push(TimeSeries::new("psi_minus", ps.clone(), theory)?);
    out.simulated
        .push(TimeSeries::new("psi_minus", ps, simulated)?);
    Ok(out)
}

/// ⟨σx⟩ of the system after n collisions. Mitigation, when enabled, skips
/// the separable variant.
fn collisional(lab: &Lab) -> Result<ExperimentOutput> {
    let g = &lab.cfg.grid;
    let ns: Vec<u32> = (1..=g.n_max).collect();
    let times: Vec<f64> = ns.iter().map(|&n| f64::from(n)).collect();
    let variants = [("correlated", true), ("separable", false)];
    let tasks: Vec<(bool, u32)> = variants
        .iter()
        .flat_map(|&(_, c)| ns.iter().map(move |&n| (c, n)))
        .collect();
    let analytic = |correlated: bool, n: u32| {
        if correlated {
            collisional_correlated(n, g.g_tau)
        } else {
            collisional_separable(n, g.g_tau)
        }
    };
    let plus = PureState::plus().density();
    let coherence = |ch: &KrausChannel| -> Result<f64> { Ok(ch.apply(&plus)?.bloch_vector()?[0]) };

    let mut out = ExperimentOutput::new();
    let mut diagnostics = serde_json::Map::new();
    for &(label, correlated) in &variants {
        let mut values = Vec::with_capacity(ns.len());
        for &n in &ns {
            let ch = analytic(correlated, n)?;
            values.push(coherence(&ch)?);
            out.dump_channel(label, f64::from(n), &ch)?;
            out.dump_circuit(
                label,
                f64::from(n),
                build_collisional_circuit(n, g.g_tau, correlated)?,
            );
        }
        out.theory
            .push(TimeSeries::new(label, times.clone(), values)?);

        let scan_grid: Vec<f64> = (0..=g.n_max).map(f64::from).collect();
        let eigs = (0..=g.n_max)
            .map(|n| {
                let l = coherence(&analytic(correlated, n)?)?;
                Ok([l, l, 1.0])
            })
            .collect::<Result<Vec<_>>>()?;
        let flagged = p_divisibility_scan_pauli(&scan_grid, &eigs, SCAN_TOL)?;
        diagnostics.insert(
            label.to_string(),
            json!({ "p_divisibility_violations": flagged }),
        );
    }
    out.diagnostics = Value::Object(diagnostics);

    let cal = lab.calibration(1)?;
    let values = par_map(&tasks, |i, &(correlated, n)| {
        let c = build_collisional_circuit(n, g.g_tau, correlated)?;
        let state = lab.run(&c, &c.initial_state())?;
        let counts = lab.measure_z(&state, &[0], lab.seed(i))?;
        let cal = if correlated { cal.as_ref() } else { None };
        Ok(parity(&distribution(&counts, 1, cal)?))
    })?;
    for (k, &(label, _)) in variants.iter().enumerate() {
        let v = values[k * ns.len()..(k + 1) * ns.len()].to_vec();
        out.simulated
            .push(TimeSeries::new(label, times.clone(), v)?);
    }
    Ok(out)
}

fn damping_grids(lab: &Lab) -> Result<Vec<(f64, ADParams, Vec<f64>)>> {
    let g = &lab.cfg.grid;
    ratios(lab)
        .into_iter()
        .map(|r| {
            let p = ADParams::from_ratio(r, g.lambda)?;
            let span = g.t_max.unwrap_or_else(|| damping_span(r, g.lambda));
            Ok((r, p, uniform_grid(0.0, span, g.points)))
        })
        .collect()
}

fn excited_population(
    lab: &Lab,
    t: f64,
    p: &ADParams,
    seed: u64,
    cal: Option<&CalibrationMatrix>,
) -> Result<f64> {
    let c = build_amplitude_damping_circuit(t, p, false, WitnessBasis::ZZ)?;
    let state = lab.run(&c, &c.initial_state())?;
    Ok(distribution(&lab.measure_z(&state, &[0], seed)?, 1, cal)?[1])
}

fn damping_diagnostics(p: &ADParams, times: &[f64], witness: &TimeSeries) -> Result<Value> {
    let rates: Vec<f64> = times.iter().filter_map(|&t| gamma_ad(t, p).ok()).collect();
    let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let scan = cp_divisibility_scan(
        |t| Ok(choi(&amplitude_damping_channel(t, p)?)),
        times,
        SCAN_TOL,
    )?;
    let count = |s: Divisibility| scan.iter().filter(|r| r.status == s).count();
    Ok(json!({
        "min_decay_rate": min_rate,
        "non_cp_intervals": count(Divisibility::NonCp),
        "indeterminate_intervals": count(Divisibility::Indeterminate),
        "witness_revivals": detect_revivals(witness, REVIVAL_TOL)?.len(),
    }))
}

/// Excited population and the entanglement witness for each coupling ratio.
fn amplitude_damping(lab: &Lab) -> Result<ExperimentOutput> {
    let grids = damping_grids(lab)?;
    let mut out = ExperimentOutput::new();
    let mut diagnostics = serde_json::Map::new();
    for (r, p, times) in &grids {
        let mut pop = Vec::with_capacity(times.len());
        let mut wit = Vec::with_capacity(times.len());
        for &t in times {
            let ch = amplitude_damping_channel(t, p)?;
            pop.push(c1(t, p)?.powi(2));
            wit.push(witness_f_kraus(&ch)?);
            let label = ratio_label("amplitude damping", *r);
            out.dump_channel(&label, t, &ch)?;
            for b in WitnessBasis::ALL {
                let c = build_amplitude_damping_circuit(t, p, true, b)?;
                out.dump_circuit(&format!("{label} witness {}", b.label()), t, c);
            }
        }
        let witness = TimeSeries::new(ratio_label("witness", *r), times.clone(), wit)?;
        diagnostics.insert(format!("R={r}"), damping_diagnostics(p, times, &witness)?);
        out.theory.push(TimeSeries::new(
            ratio_label("population", *r),
            times.clone(),
            pop,
        )?);
        out.theory.push(witness);
    }
    out.diagnostics = Value::Object(diagnostics);

    let cal1 = lab.calibration(1)?;
    let cal2 = lab.calibration(2)?;
    let tasks: Vec<(usize, f64)> = grids
        .iter()
        .enumerate()
        .flat_map(|(k, (_, _, ts))| ts.iter().map(move |&t| (k, t)))
        .collect();
    let values = par_map(&tasks, |i, &(k, t)| {
        let p = &grids[k].1;
        let seed = lab.seed(i);
        let pop = excited_population(lab, t, p, mix_seed(seed, 0), cal1.as_ref())?;
        let mut corr = [0.0; 3];
        for (j, b) in WitnessBasis::ALL.into_iter().enumerate() {
            let c = build_amplitude_damping_circuit(t, p, true, b)?;
            let state = lab.run(&c, &c.initial_state())?;
            let counts = lab.measure_z(&state, &[0, 2], mix_seed(seed, 1 + j as u64))?;
            corr[j] = parity(&distribution(&counts, 2, cal2.as_ref())?);
        }
        Ok((pop, witness_from_correlators(corr[0], corr[1], corr[2])))
    })?;
    let mut offset = 0;
    for (r, _, times) in &grids {
        let chunk = &values[offset..offset + times.len()];
        offset += times.len();
        let pop = chunk.iter().map(|v| v.0).collect();
        let wit = chunk.iter().map(|v| v.1).collect();
        out.simulated.push(TimeSeries::new(
            ratio_label("population", *r),
            times.clone(),
            pop,
        )?);
        out.simulated.push(TimeSeries::new(
            ratio_label("witness", *r),
            times.clone(),
            wit,
        )?);
    }
    Ok(out)
}

/// Preparation of the probe state on qubit 0.
fn probe_gates() -> [Gate; 2] {
    [Gate::ry(0, PI / 4.0), Gate::rz(0, PI / 4.0)]
}

fn probe_state() -> Result<DensityMatrix> {
    let mut c = Circuit::new(1);
    c.extend(probe_gates());
    run_exact(&c, &DensityMatrix::basis(1, 0)?)
}

fn depolarizing_full_circuit(p: f64) -> Result<Circuit> {
    let body = build_depolarizing_circuit(p)?;
    let mut c = Circuit::new(body.num_qubits);
    c.extend(probe_gates()).extend(body.gates);
    Ok(c)
}

/// Single-qubit tomography of the probe state after the depolarizing circuit.
fn depolarizing_tomography(lab: &Lab) -> Result<ExperimentOutput> {
    let ps = p_grid(lab);
    let probe = probe_state()?;
    let mut out = ExperimentOutput::new();
    let mut expected = Vec::with_capacity(ps.len());
    for &p in &ps {
        let ch = depolarizing(p)?;
        expected.push(ch.apply(&probe)?);
        out.dump_channel("depolarizing", p, &ch)?;
        out.dump_circuit("depolarizing", p, depolarizing_full_circuit(p)?);
    }
    let labels = ["bloch_x", "bloch_y", "bloch_z"];
    let theory_bloch = expected
        .iter()
        .map(DensityMatrix::bloch_vector)
        .collect::<Result<Vec<_>>>()?;
    for (j, label) in labels.iter().enumerate() {
        let v = theory_bloch.iter().map(|b| b[j]).collect();
        out.theory.push(TimeSeries::new(*label, ps.clone(), v)?);
    }

    let cal = lab.calibration(1)?;
    let estimates = par_map(&ps, |i, &p| {
        let c = depolarizing_full_circuit(p)?;
        let state = lab.run(&c, &DensityMatrix::basis(c.num_qubits, 0)?)?;
        let records = lab.tomography(&state, &[0], lab.seed(i))?;
        tomography(&records, cal.as_ref())
    })?;
    let sim_bloch = estimates
        .iter()
        .map(DensityMatrix::bloch_vector)
        .collect::<Result<Vec<_>>>()?;
    for (j, label) in labels.iter().enumerate() {
        let v = sim_bloch.iter().map(|b| b[j]).collect();
        out.simulated.push(TimeSeries::new(*label, ps.clone(), v)?);
    }
    let fid = estimates
        .iter()
        .zip(&expected)
        .map(|(a, b)| fidelity(a, b))
        .collect::<Result<Vec<_>>>()?;
    out.simulated.push(TimeSeries::new("fidelity", ps, fid)?);
    Ok(out)
}

/// System on qubit 0, Pauli ancillae on 1 and 2, memory on 3.
fn pauli_work_circuit(probabilities: [f64; 4]) -> Result<Circuit> {
    let [a, b, c, d] = probabilities;
    let body = build_pauli_circuit(&solve_pauli_angles(a, b, c, d)?)?;
    let mut circuit = Circuit::new(4);
    circuit
        .push(Gate::h(3))
        .push(Gate::cnot(3, 0))
        .extend(body.gates);
    Ok(circuit)
}

/// Extractable work (units of kT ln 2) for a system initially maximally
/// entangled with a memory, under the eternal and tan Pauli channels.
fn pauli_work(lab: &Lab) -> Result<ExperimentOutput> {
    let g = &lab.cfg.grid;
    let channels = [
        (
            "eternal",
            PauliRates::eternal(g.eternal.lambda, g.eternal.omega),
            g.t_max.unwrap_or(ETERNAL_SPAN / g.eternal.lambda),
        ),
        (
            "tan",
            PauliRates::tan_channel(g.tan.lambda, g.tan.omega),
            g.t_max
                .unwrap_or(TAN_SPAN_FRACTION * PI / (2.0 * g.tan.omega)),
        ),
    ];
    let phi = PureState::bell(Bell::PhiPlus).density();
    let mut out = ExperimentOutput::new();
    let mut diagnostics = serde_json::Map::new();
    let mut tasks = Vec::new();
    for (k, (label, rates, span)) in channels.iter().enumerate() {
        let times = uniform_grid(0.0, *span, g.points);
        let mut work = Vec::with_capacity(times.len());
        for &t in &times {
            let [a, b, c, d] = pauli_rates_to_probabilities(rates, t)?;
            let ch = pauli_channel(a, b, c, d)?;
            work.push(work_bits(&ch.apply_on(&phi, &[0])?)?);
            out.dump_channel(label, t, &ch)?;
            out.dump_circuit(label, t, pauli_work_circuit([a, b, c, d])?);
            tasks.push((k, t, [a, b, c, d]));
        }
        let series = TimeSeries::new(*label, times, work)?;
        diagnostics.insert(
            label.to_string(),
            json!({ "work_revivals": detect_revivals(&series, REVIVAL_TOL)?.len() }),
        );
        out.theory.push(series);
    }
    out.diagnostics = Value::Object(diagnostics);

    let cal = lab.calibration(2)?;
    let values = par_map(&tasks, |i, &(_, _, probs)| {
        let c = pauli_work_circuit(probs)?;
        let state = lab.run(&c, &DensityMatrix::basis(4, 0)?)?;
        let records = lab.tomography(&state, &[0, 3], lab.seed(i))?;
        work_bits(&tomography(&records, cal.as_ref())?)
    })?;
    for (k, (label, _, _)) in channels.iter().enumerate() {
        let (times, v): (Vec<f64>, Vec<f64>) = tasks
            .iter()
            .zip(&values)
            .filter(|((j, _, _), _)| *j == k)
            .map(|((_, t, _), w)| (*t, *w))
            .unzip();
        out.simulated.push(TimeSeries::new(*label, times, v)?);
    }
    Ok(out)
}

/// Amplitude-damping quantum capacity from the transmissivity |c1|², the
/// simulated one estimated from the ratio of excited populations.
fn capacity(lab: &Lab) -> Result<ExperimentOutput> {
    let grids = damping_grids(lab)?;
    let mut out = ExperimentOutput::new();
    let mut diagnostics = serde_json::Map::new();
    for (r, p, times) in &grids {
        let q = times
            .iter()
            .map(|&t| channel_capacity_ad(c1(t, p)?.powi(2)))
            .collect::<Result<Vec<_>>>()?;
        for &t in times {
            let label = ratio_label("amplitude damping", *r);
            out.dump_channel(&label, t, &amplitude_damping_channel(t, p)?)?;
            out.dump_circuit(
                &label,
                t,
                build_amplitude_damping_circuit(t, p, false, WitnessBasis::ZZ)?,
            );
        }
        let vanished = q.iter().position(|&v| v == 0.0);
        let revived = vanished.is_some_and(|k| q[k..].iter().any(|&v| v > 0.01));
        diagnostics.insert(
            format!("R={r}"),
            json!({ "vanishes": vanished.is_some(), "revives": revived }),
        );
        out.theory.push(TimeSeries::new(
            ratio_label("capacity", *r),
            times.clone(),
            q,
        )?);
    }
    out.diagnostics = Value::Object(diagnostics);

    let cal = lab.calibration(1)?;
    let tasks: Vec<(usize, f64)> = grids
        .iter()
        .enumerate()
        .flat_map(|(k, (_, _, ts))| ts.iter().map(move |&t| (k, t)))
        .collect();
    let pops = par_map(&tasks, |i, &(k, t)| {
        excited_population(lab, t, &grids[k].1, lab.seed(i), cal.as_ref())
    })?;
    let mut offset = 0;
    for (r, _, times) in &grids {
        let chunk = &pops[offset..offset + times.len()];
        offset += times.len();
        let reference = chunk[0];
        if reference.is_nan() || reference <= 0.0 {
            return Err(Error::Model {
                t: times[0],
                detail: "no excitation measured at the first grid point".into(),
            });
        }
        let q = chunk
            .iter()
            .map(|&pt| channel_capacity_ad((pt / reference).clamp(0.0, 1.0)))
            .collect::<Result<Vec<_>>>()?;
        out.simulated.push(TimeSeries::new(
            ratio_label("capacity", *r),
            times.clone(),
            q,
        )?);
    }
    Ok(out)
}
