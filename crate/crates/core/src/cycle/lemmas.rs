//! Executable checks of the interval-structure lemmas, one order at a time,
//! and exhaustive/sampled sweeps over many orders.

use rayon::prelude::*;
use serde::Serialize;

use super::{realize_unchecked, CyclicOrder, IntervalFamily};
use crate::count::star_size;
use crate::error::{Error, Result};
use crate::matching::{Family, Signature, Vertex};
use crate::Count;

fn check_inputs(order: &CyclicOrder, family: &Family, sig: Signature) -> Result<()> {
    sig.validate(order.n())?;
    if family.n() != order.n() {
        return Err(Error::MismatchedGraphs(family.n(), order.n()));
    }
    Ok(())
}

/// Positions `start, start+1, ..., start+len-1` modulo `n`, sorted.
fn cyclic_run(start: usize, len: usize, n: usize) -> Vec<usize> {
    let mut run: Vec<usize> = (0..len).map(|j| (start + j) % n).collect();
    run.sort_unstable();
    run.dedup();
    run
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma1Check {
    pub realized: usize,
    pub bound: usize,
    pub holds: bool,
    /// `n >= 2(p+s)`. The family being intersecting is the caller's side.
    pub hypothesis_met: bool,
}

/// Counts distinct realized members against `2p + s`.
pub fn check_lemma1(order: &CyclicOrder, family: &Family, sig: Signature) -> Result<Lemma1Check> {
    check_inputs(order, family, sig)?;
    let realized = realize_unchecked(order, family, sig).realized();
    Ok(Lemma1Check {
        realized,
        bound: sig.order(),
        holds: realized <= sig.order(),
        hypothesis_met: order.n() >= 2 * sig.span(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum Lemma2Verdict {
    /// The order does not realize exactly `2p + s` members.
    NotApplicable { realized: usize },
    /// B-intervals at `start..=start+p+s-k`, R-intervals at
    /// `start-(k-1)..=start+p-1` (0-based, cyclic).
    Holds { start: usize, k: usize },
    Violated {
        k: Option<usize>,
        b_positions: Vec<usize>,
        r_positions: Vec<usize>,
    },
}

pub fn lemma2_structure(realized: &IntervalFamily, n: usize, sig: Signature) -> Lemma2Verdict {
    if realized.realized() != sig.order() {
        return Lemma2Verdict::NotApplicable {
            realized: realized.realized(),
        };
    }
    let violated = || Lemma2Verdict::Violated {
        k: realized.k,
        b_positions: realized.b_positions.clone(),
        r_positions: realized.r_positions.clone(),
    };
    let Some(k) = realized.k else {
        return violated();
    };
    if k == 0 || k > sig.span() + 1 {
        return violated();
    }
    let b_len = sig.span() + 1 - k;
    let r_len = sig.p + k - 1;
    for &start in &realized.b_positions {
        let r_start = (start + n - (k - 1) % n) % n;
        if realized.b_positions == cyclic_run(start, b_len, n) && realized.r_positions == cyclic_run(r_start, r_len, n)
        {
            return Lemma2Verdict::Holds { start, k };
        }
    }
    violated()
}

/// Checks that realized B- and R-intervals form the two consecutive runs
/// tied together by the k-statistic.
pub fn check_lemma2(order: &CyclicOrder, family: &Family, sig: Signature) -> Result<Lemma2Verdict> {
    check_inputs(order, family, sig)?;
    Ok(lemma2_structure(&realize_unchecked(order, family, sig), order.n(), sig))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma3Check {
    pub k: Option<usize>,
    pub holds: bool,
    /// No B-interval realized, so there is no k to test.
    pub vacuous: bool,
    /// `n > 2(p+s)` and the family has star size.
    pub hypothesis_met: bool,
}

pub fn lemma3_from(realized: &IntervalFamily, sig: Signature) -> (bool, bool) {
    match realized.k {
        None => (true, true),
        Some(k) => (k == 1 || k == sig.s + 1, false),
    }
}

/// `k` must be `1` or `s + 1`.
pub fn check_lemma3(order: &CyclicOrder, family: &Family, sig: Signature) -> Result<Lemma3Check> {
    check_inputs(order, family, sig)?;
    let realized = realize_unchecked(order, family, sig);
    let (holds, vacuous) = lemma3_from(&realized, sig);
    let star: Count = star_size(order.n(), sig)?;
    Ok(Lemma3Check {
        k: realized.k,
        holds,
        vacuous,
        hypothesis_met: order.n() > 2 * sig.span() && family.len() as Count == star,
    })
}

/// Lowest vertex common to every realized member; `None` when nothing is
/// realized or the realized members share no vertex.
pub fn center_of(order: &CyclicOrder, family: &Family, sig: Signature) -> Result<Option<Vertex>> {
    check_inputs(order, family, sig)?;
    let common = realize_unchecked(order, family, sig).common_mask();
    Ok((common != 0).then(|| Vertex::from_slot(common.trailing_zeros() as usize)))
}

pub fn is_centered_at(order: &CyclicOrder, family: &Family, sig: Signature, x: Vertex) -> bool {
    let realized = realize_unchecked(order, family, sig);
    realized.realized() > 0 && realized.common_mask() & x.bit() != 0
}

#[derive(Clone, Debug, Serialize)]
pub struct OperationViolation {
    pub order: CyclicOrder,
    /// e.g. `"t_3"` or `"s_2"` (1-based positions).
    pub operation: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SwapFinding {
    /// 1-based swap position.
    pub position: usize,
    pub checked: usize,
    pub preserved: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma4Report {
    pub applicable: bool,
    pub reason: Option<String>,
    pub center: Option<Vertex>,
    pub orders: usize,
    pub centered: usize,
    pub transposition_checks: usize,
    pub transposition_failures: usize,
    /// 1-based position of the designated swap, `p + s`.
    pub swap_position: usize,
    pub swap_checks: usize,
    pub swap_failures: usize,
    /// Swaps at every position in `[p+s, n-(p+s)]`; reported, not asserted.
    pub swap_range: Vec<SwapFinding>,
    pub violations: Vec<OperationViolation>,
}

impl Lemma4Report {
    fn not_applicable(reason: String, sig: Signature) -> Lemma4Report {
        Lemma4Report {
            applicable: false,
            reason: Some(reason),
            center: None,
            orders: 0,
            centered: 0,
            transposition_checks: 0,
            transposition_failures: 0,
            swap_position: sig.span(),
            swap_checks: 0,
            swap_failures: 0,
            swap_range: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.applicable && self.transposition_failures == 0 && self.swap_failures == 0
    }
}

const VIOLATION_LIMIT: usize = 16;

/// Why the extremal-family lemmas do not apply, if they don't.
pub fn extremal_precondition(family: &Family, n: usize, sig: Signature) -> Result<Option<String>> {
    sig.validate(n)?;
    if n <= 2 * sig.span() {
        return Ok(Some(format!("n <= 2(p+s) = {}", 2 * sig.span())));
    }
    let star: Count = star_size(n, sig)?;
    if family.len() as Count != star {
        return Ok(Some(format!("family has {} members, maximum is {star}", family.len())));
    }
    if family.uniform_signature() != Some(sig) {
        return Ok(Some(format!("members do not all have signature {sig}")));
    }
    if !family.is_intersecting() {
        return Ok(Some("family is not intersecting".into()));
    }
    Ok(None)
}

/// For every order centered at the family's center, the adjacent
/// transpositions `t_1..t_{n-2}` and the swap at position `p + s` must keep
/// it centered there. `orders` is the (restricted) order space to walk.
pub fn check_lemma4(family: &Family, sig: Signature, orders: &[CyclicOrder]) -> Result<Lemma4Report> {
    let n = family.n();
    if let Some(reason) = extremal_precondition(family, n, sig)? {
        return Ok(Lemma4Report::not_applicable(reason, sig));
    }
    if let Some(bad) = orders.iter().find(|o| o.n() != n || !o.is_restricted()) {
        return Err(Error::InvalidOrder(format!(
            "{bad} is not a restricted order over {n} edges"
        )));
    }
    let canonical = CyclicOrder::canonical(n)?;
    let center = std::iter::once(&canonical).chain(orders).find_map(|o| {
        let common = realize_unchecked(o, family, sig).common_mask();
        (common != 0).then(|| Vertex::from_slot(common.trailing_zeros() as usize))
    });
    let Some(x) = center else {
        return Ok(Lemma4Report::not_applicable("no order is centered".into(), sig));
    };

    let swap_pos = sig.span() - 1;
    let range: Vec<usize> = (sig.span()..=n - sig.span()).map(|j| j - 1).collect();

    #[derive(Default)]
    struct Acc {
        centered: usize,
        t_checks: usize,
        t_fail: usize,
        s_checks: usize,
        s_fail: usize,
        range: Vec<(usize, usize)>,
        violations: Vec<OperationViolation>,
    }
    let per_order = |o: &CyclicOrder| -> Acc {
        let mut acc = Acc {
            range: vec![(0, 0); range.len()],
            ..Acc::default()
        };
        if !is_centered_at(o, family, sig, x) {
            return acc;
        }
        acc.centered = 1;
        for i in 0..n - 2 {
            let image = o.adjacent_transpose(i).expect("i + 1 < n - 1");
            acc.t_checks += 1;
            if !is_centered_at(&image, family, sig, x) {
                acc.t_fail += 1;
                acc.violations.push(OperationViolation {
                    order: o.clone(),
                    operation: format!("t_{}", i + 1),
                });
            }
        }
        let image = o.swap(swap_pos).expect("p + s < n");
        acc.s_checks += 1;
        if !is_centered_at(&image, family, sig, x) {
            acc.s_fail += 1;
            acc.violations.push(OperationViolation {
                order: o.clone(),
                operation: format!("s_{}", swap_pos + 1),
            });
        }
        for (slot, &j) in range.iter().enumerate() {
            let image = o.swap(j).expect("j < n");
            acc.range[slot] = (1, usize::from(is_centered_at(&image, family, sig, x)));
        }
        acc
    };
    let merged = orders.par_iter().map(per_order).reduce(
        || Acc {
            range: vec![(0, 0); range.len()],
            ..Acc::default()
        },
        |mut a, b| {
            a.centered += b.centered;
            a.t_checks += b.t_checks;
            a.t_fail += b.t_fail;
            a.s_checks += b.s_checks;
            a.s_fail += b.s_fail;
            for (x, y) in a.range.iter_mut().zip(b.range) {
                x.0 += y.0;
                x.1 += y.1;
            }
            a.violations.extend(b.violations);
            a.violations.truncate(VIOLATION_LIMIT);
            a
        },
    );

    Ok(Lemma4Report {
        applicable: true,
        reason: None,
        center: Some(x),
        orders: orders.len(),
        centered: merged.centered,
        transposition_checks: merged.t_checks,
        transposition_failures: merged.t_fail,
        swap_position: swap_pos + 1,
        swap_checks: merged.s_checks,
        swap_failures: merged.s_fail,
        swap_range: range
            .iter()
            .zip(merged.range)
            .map(|(&j, (checked, preserved))| SwapFinding {
                position: j + 1,
                checked,
                preserved,
            })
            .collect(),
        violations: merged.violations,
    })
}

/// Which checks a sweep runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LemmaSet {
    pub lemma1: bool,
    pub lemma2: bool,
    pub lemma3: bool,
    pub lemma4: bool,
}

impl LemmaSet {
    pub fn all() -> LemmaSet {
        LemmaSet {
            lemma1: true,
            lemma2: true,
            lemma3: true,
            lemma4: true,
        }
    }

    /// Parses `"1,3,4"`.
    pub fn parse(text: &str) -> Result<LemmaSet> {
        let mut set = LemmaSet::default();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "1" => set.lemma1 = true,
                "2" => set.lemma2 = true,
                "3" => set.lemma3 = true,
                "4" => set.lemma4 = true,
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!("unknown lemma {other:?}"),
                    })
                }
            }
        }
        Ok(set)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FailedOrder {
    pub order: CyclicOrder,
    pub detail: String,
}

/// Per-lemma outcome over a set of orders.
#[derive(Clone, Debug, Serialize)]
pub struct Tally {
    pub applicable: bool,
    pub reason: Option<String>,
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    /// Orders where the check did not apply (e.g. fewer than `2p+s` realized).
    pub skipped: usize,
    /// Lemma 1 only: orders with exactly `2p+s` realized.
    pub equality: usize,
    pub failures: Vec<FailedOrder>,
}

impl Tally {
    fn new() -> Tally {
        Tally {
            applicable: true,
            reason: None,
            checked: 0,
            passed: 0,
            failed: 0,
            skipped: 0,
            equality: 0,
            failures: Vec::new(),
        }
    }

    fn not_applicable(reason: String) -> Tally {
        Tally {
            applicable: false,
            reason: Some(reason),
            ..Tally::new()
        }
    }

    fn record(&mut self, order: &CyclicOrder, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.failures.len() < VIOLATION_LIMIT {
                self.failures.push(FailedOrder {
                    order: order.clone(),
                    detail: detail(),
                });
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.passed += other.passed;
        self.failed += other.failed;
        self.skipped += other.skipped;
        self.equality += other.equality;
        self.failures.extend(other.failures);
        self.failures.truncate(VIOLATION_LIMIT);
    }

    pub fn pass(&self) -> bool {
        self.applicable && self.failed == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaSweep {
    pub orders: usize,
    pub lemma1: Option<Tally>,
    pub lemma2: Option<Tally>,
    pub lemma3: Option<Tally>,
    pub lemma4: Option<Lemma4Report>,
}

impl LemmaSweep {
    /// Every requested check that applies passed; checks whose hypotheses
    /// are unmet are reported but do not fail the sweep.
    pub fn pass(&self) -> bool {
        [&self.lemma1, &self.lemma2, &self.lemma3]
            .into_iter()
            .flatten()
            .all(|t| !t.applicable || t.failed == 0)
            && self.lemma4.as_ref().is_none_or(|r| !r.applicable || r.pass())
    }
}

/// Runs the selected checks for `family` over `orders`.
///
/// Lemma 1 needs an intersecting family and `n >= 2(p+s)`; Lemmas 2-4 need a
/// maximum intersecting family and `n > 2(p+s)`. Unmet hypotheses turn the
/// corresponding tally into "not applicable" rather than a failure.
pub fn sweep_lemmas(family: &Family, sig: Signature, orders: &[CyclicOrder], lemmas: LemmaSet) -> Result<LemmaSweep> {
    let n = family.n();
    sig.validate(n)?;
    if let Some(bad) = orders.iter().find(|o| o.n() != n) {
        return Err(Error::MismatchedGraphs(n, bad.n()));
    }
    let intersecting = family.is_intersecting();
    let lemma1_reason = if n < 2 * sig.span() {
        Some(format!("n < 2(p+s) = {}", 2 * sig.span()))
    } else if !intersecting {
        Some("family is not intersecting".to_string())
    } else {
        None
    };
    let extremal_reason = extremal_precondition(family, n, sig)?;

    let per_order = |o: &CyclicOrder| -> [Tally; 3] {
        let mut out = [Tally::new(), Tally::new(), Tally::new()];
        let realized = realize_unchecked(o, family, sig);
        if lemmas.lemma1 && lemma1_reason.is_none() {
            let count = realized.realized();
            out[0].record(o, count <= sig.order(), || format!("{count} realized"));
            if count == sig.order() {
                out[0].equality += 1;
            }
        }
        if extremal_reason.is_none() {
            if lemmas.lemma2 {
                match lemma2_structure(&realized, n, sig) {
                    Lemma2Verdict::NotApplicable { .. } => out[1].skipped += 1,
                    Lemma2Verdict::Holds { .. } => out[1].record(o, true, String::new),
                    v @ Lemma2Verdict::Violated { .. } => out[1].record(o, false, || format!("{v:?}")),
                }
            }
            if lemmas.lemma3 {
                let (holds, _) = lemma3_from(&realized, sig);
                out[2].record(o, holds, || format!("k = {:?}", realized.k));
            }
        }
        out
    };
    let [t1, t2, t3] = orders.par_iter().map(per_order).reduce(
        || [Tally::new(), Tally::new(), Tally::new()],
        |[mut a1, mut a2, mut a3], [b1, b2, b3]| {
            a1.merge(b1);
            a2.merge(b2);
            a3.merge(b3);
            [a1, a2, a3]
        },
    );
    let gate = |wanted: bool, tally: Tally, reason: &Option<String>| {
        wanted.then(|| match reason {
            Some(r) => Tally::not_applicable(r.clone()),
            None => tally,
        })
    };
    let lemma4 = if lemmas.lemma4 {
        Some(check_lemma4(family, sig, orders)?)
    } else {
        None
    };
    Ok(LemmaSweep {
        orders: orders.len(),
        lemma1: gate(lemmas.lemma1, t1, &lemma1_reason),
        lemma2: gate(lemmas.lemma2, t2, &extremal_reason),
        lemma3: gate(lemmas.lemma3, t3, &extremal_reason),
        lemma4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::star_family;
    use crate::cycle::{enumerate_orders, DEFAULT_ORDER_CAP};

    fn restricted(n: usize) -> Vec<CyclicOrder> {
        enumerate_orders(n, true, DEFAULT_ORDER_CAP).unwrap().collect()
    }

    #[test]
    fn lemma1_on_stars_is_tight() {
        let sig = Signature::new(1, 1);
        for x in ["l1", "r2", "l4"] {
            let star = star_family(4, sig, x.parse().unwrap()).unwrap();
            for o in restricted(4) {
                let c = check_lemma1(&o, &star, sig).unwrap();
                assert_eq!(c.realized, 3, "{o} x={x}");
                assert!(c.holds && c.hypothesis_met);
            }
        }
        let c = check_lemma1(&CyclicOrder::canonical(4).unwrap(), &Family::empty(4).unwrap(), sig).unwrap();
        assert_eq!(c.realized, 0);
        assert!(c.holds);
    }

    #[test]
    fn lemma2_and_3_on_canonical_star() {
        let sig = Signature::new(1, 2);
        let n = 7;
        let star = star_family(n, sig, Vertex::left(n - 1)).unwrap();
        let c = CyclicOrder::canonical(n).unwrap();
        // centered at l_n with k = 1: B at n-p-s+1..n, R at n-p-s+1..n-s (1-based)
        assert_eq!(
            check_lemma2(&c, &star, sig).unwrap(),
            Lemma2Verdict::Holds { start: 4, k: 1 }
        );
        let l3 = check_lemma3(&c, &star, sig).unwrap();
        assert_eq!(l3.k, Some(1));
        assert!(l3.holds && l3.hypothesis_met && !l3.vacuous);
        assert_eq!(center_of(&c, &star, sig).unwrap(), Some(Vertex::left(n - 1)));
    }

    #[test]
    fn lemma2_not_applicable_below_extremal_count() {
        let sig = Signature::new(1, 1);
        let c = CyclicOrder::canonical(5).unwrap();
        let fam = Family::new(5, vec![c.b_interval(0, sig).unwrap()]).unwrap();
        assert_eq!(
            check_lemma2(&c, &fam, sig).unwrap(),
            Lemma2Verdict::NotApplicable { realized: 1 }
        );
    }

    #[test]
    fn boundary_case_is_still_consecutive() {
        // n = 2(p+s): outside the lemma's hypothesis, recorded only
        let sig = Signature::new(1, 1);
        let star = star_family(4, sig, Vertex::left(3)).unwrap();
        let v = check_lemma2(&CyclicOrder::canonical(4).unwrap(), &star, sig).unwrap();
        assert!(matches!(v, Lemma2Verdict::Holds { .. }), "{v:?}");
    }

    #[test]
    fn center_cases() {
        let sig = Signature::new(1, 1);
        let c = CyclicOrder::canonical(5).unwrap();
        let star = star_family(5, sig, Vertex::left(4)).unwrap();
        assert_eq!(center_of(&c, &star, sig).unwrap(), Some(Vertex::left(4)));
        // B_1 = {l1 r1 l2} and B_2 = {l2 r2 l3} share only l2
        let pair = Family::new(5, vec![c.b_interval(0, sig).unwrap(), c.b_interval(1, sig).unwrap()]).unwrap();
        assert_eq!(center_of(&c, &pair, sig).unwrap(), Some(Vertex::left(1)));
        assert_eq!(center_of(&c, &Family::empty(5).unwrap(), sig).unwrap(), None);
    }

    #[test]
    fn lemma4_on_small_star() {
        let sig = Signature::new(1, 1);
        let star = star_family(5, sig, Vertex::left(4)).unwrap();
        let rep = check_lemma4(&star, sig, &restricted(5)).unwrap();
        assert!(rep.pass(), "{rep:?}");
        assert_eq!(rep.centered, 384);
        assert_eq!(rep.center, Some(Vertex::left(4)));
        assert_eq!(rep.swap_position, 2);

        let partial = Family::new(5, star.members()[1..].to_vec()).unwrap();
        let rep = check_lemma4(&partial, sig, &restricted(5)).unwrap();
        assert!(!rep.applicable);
    }

    #[test]
    fn sweep_gates_by_hypothesis() {
        let sig = Signature::new(1, 1);
        let fam = crate::construct::avoid_vertex_family(3, sig, Vertex::left(2)).unwrap();
        let rep = sweep_lemmas(&fam, sig, &restricted(3), LemmaSet::parse("1").unwrap()).unwrap();
        let t = rep.lemma1.unwrap();
        assert!(!t.applicable);
        assert!(t.reason.unwrap().contains("n < 2(p+s)"));
        assert!(LemmaSet::parse("1,5").is_err());
    }
}
