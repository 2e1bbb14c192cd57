//! LP-format text for a window model.
//!
//! Every term carries an explicit integer coefficient, including zero
//! objective weights, and rows are named `<family>_<index>`:
//!
//! ```text
//! \ 4 qubits, 3 levels, horizon 6
//! Minimize
//!  obj: 0 a_0_0 + 1 a_0_1 + 2 a_0_2 + ...
//! Subject To
//!  once_0: 1 a_0_0 + 1 a_0_1 + ... = 1
//! Binary
//!  a_0_0 a_0_1 ...
//! End
//! ```
//!
//! Long expressions wrap after ten terms onto lines indented by three
//! spaces.

use std::fmt::Write as _;

use muqut_core::ilp::{IlpModel, Sense};

const TERMS_PER_LINE: usize = 10;

fn write_terms(out: &mut String, terms: &[(usize, i64)], model: &IlpModel) {
    let names = model.variables();
    if terms.is_empty() {
        // LP rows need at least one term.
        write!(out, "0 {}", names[0].name()).unwrap();
        return;
    }
    for (i, &(v, c)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let name = names[v].name();
        match (i, c < 0) {
            (0, false) => write!(out, "{c} {name}"),
            (0, true) => write!(out, "- {} {name}", -c),
            (_, false) => write!(out, " + {c} {name}"),
            (_, true) => write!(out, " - {} {name}", -c),
        }
        .unwrap();
    }
}

pub fn export_lp(model: &IlpModel) -> String {
    let problem = model.problem();
    let mut out = String::new();
    writeln!(
        out,
        "\\ {} qubits, {} levels, horizon {}",
        problem.num_qubits(),
        problem.levels.len(),
        problem.horizon
    )
    .unwrap();
    out.push_str("Minimize\n obj: ");
    write_terms(&mut out, model.objective(), model);
    out.push_str("\nSubject To\n");
    for (i, row) in model.constraints().iter().enumerate() {
        write!(out, " {}_{i}: ", row.family.tag()).unwrap();
        write_terms(&mut out, &row.terms, model);
        let sense = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        writeln!(out, " {sense} {}", row.rhs).unwrap();
    }
    out.push_str("Binary\n");
    for chunk in model.variables().chunks(TERMS_PER_LINE) {
        out.push(' ');
        let names: Vec<String> = chunk.iter().map(|v| v.name()).collect();
        out.push_str(&names.join(" "));
        out.push('\n');
    }
    out.push_str("End\n");
    out
}
