use std::fmt;

use super::gate::GateKind;

/// Where a gate angle comes from when a circuit is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Binding {
    Constant(f64),
    /// `scale · features[slot]`.
    Feature { slot: usize, scale: f64 },
    Trainable(usize),
}

impl Binding {
    pub fn feature(slot: usize) -> Self {
        Binding::Feature { slot, scale: 1.0 }
    }

    pub fn resolve(&self, features: &[f64], params: &[f64]) -> f64 {
        match *self {
            Binding::Constant(v) => v,
            Binding::Feature { slot, scale } => scale * features[slot],
            Binding::Trainable(slot) => params[slot],
        }
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Binding::Constant(v) => write!(f, "{v}"),
            Binding::Feature { slot, scale } if scale == 1.0 => write!(f, "x{slot}"),
            Binding::Feature { slot, scale } if scale == std::f64::consts::PI => {
                write!(f, "pi*x{slot}")
            }
            Binding::Feature { slot, scale } => write!(f, "{scale}*x{slot}"),
            Binding::Trainable(slot) => write!(f, "w{slot}"),
        }
    }
}

/// One gate occurrence: kind, wires (control first), and one binding per angle.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub wires: Vec<usize>,
    pub bindings: Vec<Binding>,
}

impl GateOp {
    pub fn new(kind: GateKind, wires: Vec<usize>, bindings: Vec<Binding>) -> Self {
        GateOp {
            kind,
            wires,
            bindings,
        }
    }

    pub fn single(kind: GateKind, wire: usize, bindings: Vec<Binding>) -> Self {
        Self::new(kind, vec![wire], bindings)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cnot, vec![control, target], Vec::new())
    }

    pub fn controlled(kind: GateKind, control: usize, target: usize, binding: Binding) -> Self {
        Self::new(kind, vec![control, target], vec![binding])
    }

    /// Resolve every binding against concrete feature and parameter values.
    pub fn resolve(&self, features: &[f64], params: &[f64]) -> Vec<f64> {
        self.bindings
            .iter()
            .map(|b| b.resolve(features, params))
            .collect()
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if self.kind == GateKind::AmplitudePrep {
            write!(f, " q[0..{}]", self.wires.len())?;
            if let (Some(first), Some(last)) = (self.bindings.first(), self.bindings.last()) {
                write!(f, " {first}..{last}")?;
            }
            return Ok(());
        }
        let wires: Vec<String> = self.wires.iter().map(|w| format!("q{w}")).collect();
        write!(f, " {}", wires.join(","))?;
        for b in &self.bindings {
            write!(f, " {b}")?;
        }
        Ok(())
    }
}
