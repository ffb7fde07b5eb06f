use qbind::circuit::reference::{check_published_complexity, Verdict, DEFAULT_LAYERS};
use qbind::circuit::{build_ansatz, complexity_metrics, AnsatzId, Encoding, EncodingSpec};

use crate::cli::InspectArgs;
use crate::config::{parse_id, FileConfig};
use crate::Failure;

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Match => "ok".into(),
        Verdict::KnownDeviation(why) => format!("known-deviation ({why})"),
        Verdict::Mismatch(why) => format!("MISMATCH ({why})"),
    }
}

pub fn run(args: &InspectArgs, file: &FileConfig) -> Result<(), Failure> {
    let sect = &file.inspect;
    let ansatz: Option<AnsatzId> = match (args.ansatz, &sect.ansatz) {
        (Some(a), _) => Some(a),
        (None, Some(raw)) => Some(parse_id("ansatz", raw)?),
        _ => None,
    };
    let encoding: Option<Encoding> = match (args.encoding, &sect.encoding) {
        (Some(e), _) => Some(e),
        (None, Some(raw)) => Some(parse_id("encoding", raw)?),
        _ => None,
    };
    let layers = args.layers.or(sect.layers).unwrap_or(DEFAULT_LAYERS);

    if let (Some(a), Some(e)) = (ansatz, encoding) {
        let c = build_ansatz(a, EncodingSpec::standard(e), layers)?;
        let m = complexity_metrics(&c);
        println!("# {a} {e} layers={layers} qubits={}", c.n_qubits());
        print!("{}", c.listing());
        println!(
            "# gates={} two_qubit={} params={}",
            m.total_gates, m.two_qubit_gates, m.trainable_params
        );
        println!("# depth={} serial_depth={}", m.depth, m.serial_depth);
    } else if !args.check_table1 {
        return Err(Failure::Config(
            "inspect-circuit needs --ansatz and --encoding (or --check-table1)".into(),
        ));
    }

    if !args.check_table1 {
        return Ok(());
    }
    if layers != DEFAULT_LAYERS {
        return Err(Failure::Config(format!(
            "published rows are for {DEFAULT_LAYERS} layers, not {layers}"
        )));
    }
    let mut rows = 0;
    let mut failed = 0;
    let mut known = 0;
    let mut depth_flags = 0;
    for a in AnsatzId::ALL {
        for e in Encoding::ALL {
            if ansatz.is_some_and(|x| x != a) || encoding.is_some_and(|x| x != e) {
                continue;
            }
            let chk = check_published_complexity(a, e)?;
            let (b, p) = (&chk.built, &chk.published);
            rows += 1;
            failed += usize::from(!chk.passed());
            known += [&chk.total_gates, &chk.two_qubit_gates, &chk.trainable_params]
                .iter()
                .filter(|v| matches!(v, Verdict::KnownDeviation(_)))
                .count();
            depth_flags += usize::from(!chk.depth_matches);
            println!(
                "# table1 {a} {:<9} gates={}/{} {}  two_qubit={}/{} {}  params={}/{} {}  depth={}/{} {}  {}",
                e.to_string(),
                b.total_gates,
                p.total_gates,
                verdict_text(&chk.total_gates),
                b.two_qubit_gates,
                p.two_qubit_gates,
                verdict_text(&chk.two_qubit_gates),
                b.trainable_params,
                p.trainable_params,
                verdict_text(&chk.trainable_params),
                b.depth,
                p.depth,
                if chk.depth_matches { "ok" } else { "flagged" },
                if chk.passed() { "PASS" } else { "FAIL" },
            );
        }
    }
    println!(
        "# check-table1: {}/{rows} rows pass, {known} known deviation(s), {depth_flags} depth mismatch(es) flagged",
        rows - failed
    );
    if failed > 0 {
        return Err(Failure::Conformance(format!("{failed} complexity row(s) do not match")));
    }
    Ok(())
}
