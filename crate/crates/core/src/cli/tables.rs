//! Text and CSV renderings of instances, resources, spectra and sweeps.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::SpectrumReport;
use crate::compiler::{synthesize_layer, GateCounts};
use crate::error::Result;
use crate::hamiltonians::{BinaryPolynomial, Model};
use crate::instances::Instance;

/// Header of the instance table (tab separated).
pub const ENCODE_HEADER: &str = "N\tn\tp (p')\tq (q')\tn_p\tn_q\tp_bitstring\tq_bitstring\tpsi_out";

/// One instance row: the factor pair with the smaller `p`, register
/// values most-significant bit first, and every solution state.
pub fn encode_row(inst: &Instance) -> String {
    let first = inst.solutions()[0];
    let f = inst.decode_state(first).expect("solutions are in range");
    let msb_first = |v: u64, width: usize| format!("{v:0width$b}");
    let psi: Vec<String> = inst
        .solutions()
        .iter()
        .map(|&b| format!("|{}>", inst.bitstring(b)))
        .collect();
    format!(
        "{}\t{}\t{} ({})\t{} ({})\t{}\t{}\t{}\t{}\t{}",
        inst.semiprime(),
        inst.num_qubits(),
        f.p,
        f.p_reg,
        f.q,
        f.q_reg,
        inst.n_p(),
        inst.n_q(),
        msb_first(f.p_reg, inst.n_p()),
        msb_first(f.q_reg, inst.n_q()),
        psi.join(", ")
    )
}

pub fn encode_table(instances: &[Instance]) -> String {
    let mut out = String::from(ENCODE_HEADER);
    out.push('\n');
    for inst in instances {
        out.push_str(&encode_row(inst));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResourceRow {
    #[serde(rename = "N")]
    pub semiprime: u64,
    pub n: usize,
    pub n_p: usize,
    pub n_q: usize,
    pub cnots_qubo: usize,
    pub cnots_pubo: usize,
    pub rz_qubo: usize,
    pub rz_pubo: usize,
    pub rx_qubo: usize,
    pub rx_pubo: usize,
}

/// Gate counts of one layer per model. Counts do not depend on the angles.
pub fn layer_counts(inst: &Instance, model: Model) -> Result<GateCounts> {
    let pauli = BinaryPolynomial::problem(inst, model).to_pauli();
    Ok(synthesize_layer(&pauli, 1.0, 1.0)?.counts())
}

pub fn resource_row(inst: &Instance) -> Result<ResourceRow> {
    let q = layer_counts(inst, Model::Qubo)?;
    let p = layer_counts(inst, Model::Pubo)?;
    Ok(ResourceRow {
        semiprime: inst.semiprime(),
        n: inst.num_qubits(),
        n_p: inst.n_p(),
        n_q: inst.n_q(),
        cnots_qubo: q.cnot,
        cnots_pubo: p.cnot,
        rz_qubo: q.rz,
        rz_pubo: p.rz,
        rx_qubo: q.rx,
        rx_pubo: p.rx,
    })
}

pub fn write_csv<T: Serialize>(rows: &[T]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// `index,bitstring,energy,abs_normalized_energy,sorted_rank,is_solution`
pub fn spectrum_csv(report: &SpectrumReport) -> String {
    let mut out =
        String::from("index,bitstring,energy,abs_normalized_energy,sorted_rank,is_solution\n");
    for e in &report.entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            e.index, e.bitstring, e.energy, e.abs_normalized, e.sorted_rank, e.is_solution
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub semiprime: u64,
    pub model: Model,
    pub seed: u64,
    pub layers: usize,
    pub c_min: f64,
    pub c_first: f64,
    pub ratio_first: Option<f64>,
    pub fidelity: f64,
    pub confidence: f64,
    pub solution_rank: usize,
}
