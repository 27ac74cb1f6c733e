//! End-to-end Kraines session on an integral algebra: start selection from the
//! torsion split, growth with restarts, families, cup-one sequences and the
//! free-loop cycles. The report is serializable and replayable.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::cup_one::{correction_sequence, cup_one_b_sequence, BSequence, CorrectionSequence};
use super::families::{build_y_family, closed_form_degrees, select_a_family, ASelection, YFamily, YVariant};
use super::{check_kraines, find_infinite, integral_lift, products_sum, IntegralLift, RestartRound, Status};
use crate::bar::{self, format_chain};
use crate::dga::{DGAlgebra, InvariantCheck, InvariantReport};
use crate::error::{Error, Result};
use crate::hochschild::{verify_z_cycles, HochschildComplex, ZCycleReport};
use crate::lin::{sign, Vector};
use crate::reduction::base_change;
use crate::ring::RingTag;
use crate::uct::uct_split;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub p: u64,
    /// Family length and sequence growth bound.
    pub n_max: usize,
    pub variant: YVariant,
    pub coset_bound: Option<usize>,
    /// Explicit first term; otherwise chosen from the torsion split.
    pub a1: Option<Vector>,
    pub max_rounds: usize,
}

impl SessionConfig {
    pub fn new(p: u64, n_max: usize) -> Self {
        SessionConfig { p, n_max, variant: YVariant::Plus, coset_bound: None, a1: None, max_rounds: 4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StartKind {
    /// a₁ = red_p â′ for a witness d b̂′ = p^ε â′ with deg â′ odd.
    TorsionImage,
    /// a₁ = red_p b̂′ with deg b̂′ odd.
    TorsionSource,
    /// a₁ supplied by the caller; the witness fields hold the first torsion witness, if any.
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Start {
    pub kind: StartKind,
    pub b_hat: Vector,
    pub a_hat: Vector,
    pub eps: u32,
    pub a1: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KrainesSession {
    pub source: String,
    pub config: SessionConfig,
    pub start: Start,
    pub rounds: Vec<RestartRound>,
    /// The restart loop reached an unobstructed sequence within the round cap.
    pub terminated: bool,
    /// Integral lift of the final round's terms.
    pub lift: IntegralLift,
    pub a_family: Option<ASelection>,
    pub b_sequence: Option<BSequence>,
    pub y_family: Option<YFamily>,
    pub correction: Option<CorrectionSequence>,
    /// Round whose lift feeds the correction sequence.
    pub correction_round: Option<usize>,
    pub z_cycles: Option<ZCycleReport>,
    /// Stages that were skipped, with the reason.
    pub skipped: Vec<String>,
}

fn pick_start(integral: &DGAlgebra, p: u64, explicit: Option<&Vector>) -> Result<Start> {
    let split = uct_split(integral, p, integral.top_degree())?;
    let fp = RingTag::field(p)?;
    let ws: Vec<_> = split.degrees.iter().flat_map(|d| d.h1.iter()).collect();
    if let Some(a1) = explicit {
        let (b_hat, a_hat, eps) = ws.first().map_or((Vector::new(), Vector::new(), 0), |w| (w.b_hat.clone(), w.a_hat.clone(), w.eps));
        return Ok(Start { kind: StartKind::Explicit, b_hat, a_hat, eps, a1: a1.reduced(fp) });
    }
    if let Some(w) = ws.iter().find(|w| (w.degree + 1) % 2 == 1) {
        return Ok(Start { kind: StartKind::TorsionImage, b_hat: w.b_hat.clone(), a_hat: w.a_hat.clone(), eps: w.eps, a1: w.a_hat.reduced(fp) });
    }
    if let Some(w) = ws.iter().find(|w| w.degree % 2 == 1) {
        return Ok(Start { kind: StartKind::TorsionSource, b_hat: w.b_hat.clone(), a_hat: w.a_hat.clone(), eps: w.eps, a1: w.b_hat.reduced(fp) });
    }
    Err(Error::Precondition(format!("no p-torsion witness with an odd-degree class for p = {p}")))
}

fn skip(skipped: &mut Vec<String>, stage: &str, e: Error) -> Result<()> {
    match e {
        Error::Capability(_) | Error::Precondition(_) | Error::Window { .. } => {
            skipped.push(format!("{stage}: {e}"));
            Ok(())
        }
        other => Err(other),
    }
}

/// Runs every stage that applies to `integral`; hard identity failures are
/// recorded in the report, inapplicable stages in `skipped`.
pub fn run_session(integral: &DGAlgebra, source: &str, config: &SessionConfig) -> Result<KrainesSession> {
    if integral.ring() != RingTag::Integers {
        return Err(Error::Ring("a Kraines session needs the integral algebra".into()));
    }
    let p = config.p;
    let fp = base_change(integral, RingTag::field(p)?)?;
    let start = pick_start(integral, p, config.a1.as_ref())?;
    let search = find_infinite(integral, p, &start.a1, config.n_max, config.coset_bound, config.max_rounds)?;
    let (rounds, terminated) = (search.rounds, search.terminated);
    let last = rounds.last().expect("at least one round");
    let restarted = rounds.len() > 1;
    let n = config.n_max;
    let mut skipped = Vec::new();

    let terms = match last.sequence.padded(n) {
        Ok(t) => t,
        Err(_) => last.sequence.terms.clone(),
    };
    let lift = integral_lift(integral, p, &terms)?;

    let mut a_family = None;
    if terms.len() >= n {
        match select_a_family(&fp, &terms, n) {
            Ok(s) => a_family = Some(s),
            Err(e) => skip(&mut skipped, "a-family", e)?,
        }
    } else {
        skipped.push(format!("a-family: sequence stops at {} terms", terms.len()));
    }

    let mut b_sequence = None;
    match cup_one_b_sequence(integral, &lift, &start.b_hat, &start.a_hat, start.eps, n.min(lift.lifts.len() + 1)) {
        Ok(b) => b_sequence = Some(b),
        Err(e) => skip(&mut skipped, "b-sequence", e)?,
    }

    let mut y_family = None;
    let mut z_cycles = None;
    match (&b_sequence, start.kind, restarted) {
        (Some(b), StartKind::TorsionImage, false) if terms.len() >= n => {
            let y = build_y_family(integral, &lift, b, n, config.variant);
            match y {
                Ok(y) => {
                    match hochschild_cycles(&fp, &y) {
                        Ok(z) => z_cycles = Some(z),
                        Err(e) => skip(&mut skipped, "free-loop cycles", e)?,
                    }
                    y_family = Some(y);
                }
                Err(e) => skip(&mut skipped, "y-family", e)?,
            }
        }
        (None, ..) => skipped.push("y-family: no b-sequence".into()),
        _ => skipped.push("y-family: needs an unrestarted sequence started at the torsion image".into()),
    }

    let mut correction = None;
    let correction_round = rounds.iter().position(|r| r.lift.is_some());
    match correction_round.and_then(|i| rounds[i].lift.as_ref()) {
        Some(l) => match correction_sequence(integral, l) {
            Ok(c) => correction = Some(c),
            Err(e) => skip(&mut skipped, "correction sequence", e)?,
        },
        None => skipped.push("correction sequence: no obstructed round".into()),
    }

    Ok(KrainesSession {
        source: source.to_string(),
        config: config.clone(),
        start,
        rounds,
        terminated,
        lift,
        a_family,
        b_sequence,
        y_family,
        correction,
        correction_round,
        z_cycles,
        skipped,
    })
}

fn hochschild_cycles(fp: &DGAlgebra, y: &YFamily) -> Result<ZCycleReport> {
    let window = y.members.iter().map(|m| m.x_degree).max().unwrap_or(0);
    let h = HochschildComplex::new(fp, window)?;
    let ring = fp.ring();
    let xs: Vec<_> = y.members.iter().map(|m| m.x_hat.reduced(ring)).collect();
    let ys: Vec<_> = y.members.iter().map(|m| m.y_hat.reduced(ring)).collect();
    verify_z_cycles(&h, &xs, &ys)
}

impl KrainesSession {
    /// Every identity recorded in the report holds.
    pub fn all_pass(&self) -> bool {
        self.a_family.as_ref().is_none_or(|a| a.family.identities_hold() && a.family.all_nonzero())
            && self.b_sequence.as_ref().is_none_or(BSequence::all_pass)
            && self.y_family.as_ref().is_none_or(YFamily::all_pass)
            && self.correction.as_ref().is_none_or(CorrectionSequence::all_pass)
            && self.z_cycles.as_ref().is_none_or(ZCycleReport::all_cycles)
    }

    pub fn to_text(&self, a: &DGAlgebra) -> String {
        let mut s = String::new();
        let f = |v: &Vector| a.format(v);
        let _ = writeln!(s, "kraines session: {} p={} n={}", self.source, self.config.p, self.config.n_max);
        let _ = writeln!(
            s,
            "start: {:?} b'={} a'={} eps={} a1={}",
            self.start.kind,
            f(&self.start.b_hat),
            f(&self.start.a_hat),
            self.start.eps,
            f(&self.start.a1)
        );
        for (i, r) in self.rounds.iter().enumerate() {
            let terms: Vec<_> = r.sequence.terms.iter().map(f).collect();
            let _ = writeln!(s, "round {}: terms [{}] status {}", i + 1, terms.join(", "), status_text(&r.sequence.status, a));
            if let Some(rs) = &r.restart {
                let _ = writeln!(s, "  restart: eps={} zeta={} a_hat={} next={}", rs.eps, f(&rs.zeta), f(&rs.a_hat), f(&rs.next));
            }
        }
        if !self.terminated {
            let _ = writeln!(s, "restart loop did not terminate within {} rounds", self.config.max_rounds);
        }
        let vals: Vec<_> = self.lift.valuations.iter().map(|v| v.map_or("-".into(), |e| e.to_string())).collect();
        let _ = writeln!(s, "lift defects valuations: [{}]", vals.join(", "));
        if let Some(sel) = &self.a_family {
            let fam = &sel.family;
            let _ = writeln!(s, "a-family ({:?}, ambiguous={}):", fam.candidate, sel.ambiguous);
            for (i, m) in fam.members.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "  a({}) deg {} cocycle={} coproduct={} nonzero={} : {}",
                    i + 1,
                    fam.degrees[i],
                    fam.cocycle[i],
                    fam.coproduct[i],
                    opt(fam.nonzero[i]),
                    format_chain(a, m)
                );
            }
        }
        if let Some(b) = &self.b_sequence {
            let _ = writeln!(s, "b-sequence: predicted={:?} in_kernel={:?}", b.predicted, b.in_kernel);
        }
        if let Some(y) = &self.y_family {
            let _ = writeln!(s, "y-family (requested {:?}, used {:?}):", y.requested, y.used);
            for m in &y.members {
                let _ = writeln!(
                    s,
                    "  n={} eps={} reduced_cocycle={} coproduct={} deg(y,x)=({},{}) formula={} y_nonzero={} x_nonzero={}",
                    m.n,
                    m.eps.map_or("-".into(), |e| e.to_string()),
                    m.reduced_cocycle,
                    m.coproduct,
                    m.y_degree,
                    m.x_degree,
                    m.degree_formula,
                    opt(m.y_nonzero),
                    opt(m.x_nonzero)
                );
            }
        }
        if let Some(c) = &self.correction {
            let _ = writeln!(s, "correction over {}: identity={:?} bockstein_certified={}", c.ring, c.identity, c.bockstein_certified);
        }
        if let Some(z) = &self.z_cycles {
            let bad: Vec<_> = z.verdicts.iter().filter(|v| !v.cycle).map(|v| v.label.clone()).collect();
            let _ = writeln!(s, "free-loop cycles: {} checked, failures [{}]", z.verdicts.len(), bad.join(", "));
        }
        for k in &self.skipped {
            let _ = writeln!(s, "skipped {k}");
        }
        let _ = writeln!(s, "verdict: {}", if self.all_pass() { "PASS" } else { "FAIL" });
        s
    }
}

fn opt(b: Option<bool>) -> String {
    b.map_or("-".into(), |b| b.to_string())
}

fn status_text(st: &Status, a: &DGAlgebra) -> String {
    match st {
        Status::Extendable => "extendable".into(),
        Status::InfiniteByPattern => "infinite-by-pattern".into(),
        Status::Obstructed(o) => format!("obstructed at {} by {}", o.index, a.format(&o.representative)),
    }
}

/// Re-verifies every identity from the stored data against `integral`.
pub fn replay(integral: &DGAlgebra, s: &KrainesSession) -> Result<InvariantReport> {
    let z = RingTag::Integers;
    let p = s.config.p;
    let fp = base_change(integral, RingTag::field(p)?)?;
    let mut report = InvariantReport::default();

    let mut seq = InvariantCheck::new("sequence relations");
    for (i, r) in s.rounds.iter().enumerate() {
        let ok = check_kraines(&fp, &r.sequence.terms)?.passed;
        seq.record(ok, || format!("round {} fails", i + 1));
        if let Status::Obstructed(o) = &r.sequence.status {
            let rep = products_sum(&fp, &r.sequence.terms, o.index);
            seq.record(rep == o.representative, || format!("round {} obstruction representative differs", i + 1));
        }
        if let (Some(l), Some(rs)) = (&r.lift, &r.restart) {
            seq.record(l.verify(integral) && rs.verify(integral, l), || format!("round {} restart fails", i + 1));
        }
    }
    seq.record(s.lift.verify(integral), || "final lift fails".into());
    report.checks.push(seq);

    if let Some(sel) = &s.a_family {
        let fam = &sel.family;
        let mut c = InvariantCheck::new("a-family identities");
        for (i, m) in fam.members.iter().enumerate() {
            c.record(bar::differential(&fp, m).is_zero() == fam.cocycle[i], || format!("a({}) cocycle verdict", i + 1));
            let mut t = bar::ChainPair::new();
            for n1 in 1..=i {
                t.add(&bar::tensor(&fam.members[n1 - 1], &fam.members[i - n1], fp.ring()), fp.ring());
            }
            c.record((bar::reduced_coproduct(m, fp.ring()) == t) == fam.coproduct[i], || format!("a({}) coproduct verdict", i + 1));
        }
        c.record(fam.identities_hold(), || "a-family identity fails".into());
        report.checks.push(c);
    }

    if let Some(y) = &s.y_family {
        let mut c = InvariantCheck::new("y-family identities");
        let deg_a = integral.degree_of(&s.lift.lifts[0]).unwrap_or(0);
        let deg_b = integral.degree_of(&s.start.b_hat).unwrap_or(0);
        for m in &y.members {
            c.record(bar::differential(integral, &m.y_hat) == m.delta, || format!("delta y({}) differs", m.n));
            let ok = m.eps.is_some_and(|e| {
                let q = BigInt::from(p).pow(e);
                m.x_hat.scaled(&q, z) == m.delta && !m.x_hat.reduced(fp.ring()).is_zero()
            });
            c.record(ok, || format!("x({}) extraction", m.n));
            c.record(m.identities_hold(), || format!("y({}) identities", m.n));
            if deg_a % 2 == 1 {
                c.record(closed_form_degrees(deg_a, deg_b, m.n) == (m.y_degree, m.x_degree), || format!("degrees of y({})", m.n));
            }
        }
        report.checks.push(c);
    }

    if let (Some(cs), Some(l)) = (&s.correction, s.correction_round.and_then(|i| s.rounds.get(i)).and_then(|r| r.lift.as_ref())) {
        let r = base_change(integral, cs.ring)?;
        let a: Vec<Vector> = l.lifts.iter().map(|v| v.reduced(cs.ring)).collect();
        let get = |v: &[Vector], i: usize| v.get(i.wrapping_sub(1)).cloned().unwrap_or_default();
        let mut c = InvariantCheck::new("correction identity");
        for m in 1..=cs.x.len() {
            let mut rhs = Vector::new();
            for i in 1..m {
                rhs.add(&r.mul(&get(&a, i), &get(&cs.z, m - i)), cs.ring);
                rhs.sub(&r.mul(&get(&cs.z, i), &get(&a, m - i)), cs.ring);
            }
            c.record(r.d(&cs.x[m - 1]) == rhs, || format!("n = {m}"));
        }
        c.record(cs.bockstein_certified, || "Bockstein certificate".into());
        report.checks.push(c);
    }

    if let Some(b) = &s.b_sequence {
        let mut c = InvariantCheck::new("b-sequence residuals");
        let pe = BigInt::from(p).pow(b.eps);
        let deg_b = integral.degree_of(&b.terms[0]).unwrap_or(0);
        let sg = sign(deg_b as i64 + 1);
        let get = |v: &[Vector], i: usize| v.get(i.wrapping_sub(1)).cloned().unwrap_or_default();
        c.record(integral.d(&b.terms[0]) == s.start.a_hat.scaled(&pe, z), || "d b1".into());
        for n in 2..=b.terms.len() {
            let mut r = integral.d(&b.terms[n - 1]);
            for i in 1..n {
                r.sub(&integral.mul(&get(&s.lift.lifts, i), &b.terms[n - i - 1]), z);
                r.sub(&integral.mul(&b.terms[i - 1], &get(&s.lift.lifts, n - i)).scaled(&sg, z), z);
            }
            c.record(r == b.residuals[n - 2] && b.predicted[n - 2] && b.in_kernel[n - 2], || format!("n = {n}"));
        }
        report.checks.push(c);
    }

    if let Some(zc) = &s.z_cycles {
        let mut c = InvariantCheck::new("free-loop cycles");
        for v in &zc.verdicts {
            c.record(v.cycle, || v.label.clone());
        }
        report.checks.push(c);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kraines::restart_example;
    use crate::presets;

    #[test]
    fn moore_session_passes_and_replays() {
        let z = presets::moore(3, 2).unwrap();
        let s = run_session(&z, "moore(3,2)", &SessionConfig::new(3, 4)).unwrap();
        assert_eq!(s.start.kind, StartKind::TorsionImage);
        assert!(s.all_pass(), "{}", s.to_text(&z));
        assert!(s.y_family.is_some() && s.z_cycles.is_some());
        let json = serde_json::to_string(&s).unwrap();
        let back: KrainesSession = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let r = replay(&z, &back).unwrap();
        assert!(r.all_passed(), "{r:?}");
    }

    #[test]
    fn tampered_report_fails_replay() {
        let z = presets::moore(3, 2).unwrap();
        let mut s = run_session(&z, "moore(3,2)", &SessionConfig::new(3, 3)).unwrap();
        let y = s.y_family.as_mut().unwrap();
        y.members[1].x_hat = y.members[1].x_hat.scaled(&BigInt::from(2), RingTag::Integers);
        assert!(!replay(&z, &s).unwrap().all_passed());
    }

    #[test]
    fn simplicial_session_uses_the_torsion_source() {
        let k = crate::simplicial::SimplicialComplex::moore_space(3).unwrap();
        let z = crate::simplicial::cochain_algebra(&k, RingTag::Integers).unwrap();
        let s = run_session(&z, "moore-space", &SessionConfig::new(3, 4)).unwrap();
        assert_eq!(s.start.kind, StartKind::TorsionSource);
        assert!(matches!(s.rounds[0].sequence.status, Status::Obstructed(ref o) if o.index == 3));
        assert_eq!(s.correction_round, Some(0));
        // the restart lands on a multiple of the same degree-1 class every round
        assert!(!s.terminated);
        assert!(s.correction.is_some() && s.b_sequence.is_some() && s.a_family.is_none());
        assert!(s.all_pass(), "{}", s.to_text(&z));
        assert!(replay(&z, &s).unwrap().all_passed());
    }

    #[test]
    fn restart_session() {
        let z = restart_example(3).unwrap();
        let auto = run_session(&z, "restart", &SessionConfig::new(3, 4)).unwrap();
        assert_eq!(auto.start.kind, StartKind::TorsionSource);
        let mut cfg = SessionConfig::new(3, 4);
        cfg.a1 = Some(z.element("x").unwrap());
        let s = run_session(&z, "restart", &cfg).unwrap();
        assert_eq!(s.rounds.len(), 2);
        assert_eq!(s.rounds[1].sequence.status, Status::InfiniteByPattern);
        assert!(s.y_family.is_none());
        assert!(replay(&z, &s).unwrap().all_passed());
    }
}
