//! Subgraphs of `G_{m,n}` (m disjoint copies of `K_n`) with a signature
//! vector, and brute-force EKR checks on them.
//!
//! Vertex `v` of component `c` (both 0-based) is bit `c * n + v` of a `u64`.
//! With `n = 2` this is exactly the `M_m` slot layout, so `s = (s, p)`
//! reproduces `H^(p,s)(m)` mask for mask.

use std::fmt;

use serde::Serialize;

use crate::count::{binomial, exact_div, factorial, mul, ExactInt};
use crate::error::{Error, Result};
use crate::extremal::{ekr_verdict_masks, EkrVerdict, Strong, VerdictOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ComponentsGraph {
    pub components: usize,
    pub clique_size: usize,
}

impl ComponentsGraph {
    pub fn new(m: usize, n: usize) -> Result<ComponentsGraph> {
        if m == 0 || n == 0 || m * n > 64 {
            return Err(Error::UnsupportedSize(m, n));
        }
        Ok(ComponentsGraph {
            components: m,
            clique_size: n,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.components * self.clique_size
    }

    /// Bits of component `c`.
    pub fn component_mask(&self, c: usize) -> u64 {
        let n = self.clique_size;
        (u64::MAX >> (64 - n)) << (c * n)
    }
}

/// `s[i-1]` copies of `K_i`; trailing zeros are insignificant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignatureVector(Vec<usize>);

impl SignatureVector {
    pub fn new(mut counts: Vec<usize>) -> Result<SignatureVector> {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        if counts.is_empty() {
            return Err(Error::InvalidSubgraph("signature vector is all zeros".into()));
        }
        Ok(SignatureVector(counts))
    }

    /// Parses `"1,1"` or `"(0,1)"`.
    pub fn parse(text: &str) -> Result<SignatureVector> {
        let body = text.trim().trim_start_matches('(').trim_end_matches(')');
        let counts = body
            .split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: 1,
                    message: format!("bad signature entry {t:?} in {text:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SignatureVector::new(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    /// Number of components a member occupies.
    pub fn parts(&self) -> usize {
        self.0.iter().sum()
    }

    /// Largest clique size asked for.
    pub fn max_clique(&self) -> usize {
        self.0.len()
    }

    pub fn validate(&self, g: ComponentsGraph) -> Result<()> {
        if self.max_clique() > g.clique_size {
            return Err(Error::InvalidSubgraph(format!(
                "signature {self} asks for K_{} inside K_{}",
                self.max_clique(),
                g.clique_size
            )));
        }
        if self.parts() > g.components {
            return Err(Error::InvalidSubgraph(format!(
                "signature {self} needs {} components, graph has {}",
                self.parts(),
                g.components
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SignatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for SignatureVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `m! / (prod s_i! (m - sum s_i)!) * prod C(n,i)^(s_i)`.
pub fn signature_family_size<T: ExactInt>(g: ComponentsGraph, sig: &SignatureVector) -> Result<T> {
    sig.validate(g)?;
    let m = g.components;
    let mut denom = factorial::<T>(m - sig.parts())?;
    let mut subsets = T::one();
    for (i, &c) in sig.counts().iter().enumerate() {
        denom = mul(&denom, &factorial(c)?)?;
        let choose: T = binomial(g.clique_size, i + 1)?;
        for _ in 0..c {
            subsets = mul(&subsets, &choose)?;
        }
    }
    mul(&exact_div(factorial(m)?, denom)?, &subsets)
}

/// Every `k`-subset of `0..n` as a bitmask, ascending.
fn subsets(n: usize, k: usize) -> Vec<u64> {
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut x: u64 = (1 << k) - 1;
    while x < 1 << n {
        out.push(x);
        // Gosper's hack
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

/// All members of `H^s(m, n)`, ascending by mask. Refuses families larger
/// than `cap`.
pub fn enumerate_signature_family(g: ComponentsGraph, sig: &SignatureVector, cap: usize) -> Result<Vec<u64>> {
    let size: u128 = signature_family_size(g, sig)?;
    if size > cap as u128 {
        return Err(Error::CapExceeded {
            what: "signature family",
            needed: size,
            cap: cap as u128,
        });
    }
    let n = g.clique_size;
    let by_size: Vec<Vec<u64>> = (0..=n).map(|k| subsets(n, k)).collect();
    let mut remaining = sig.counts().to_vec();
    let mut out = Vec::with_capacity(size as usize);

    fn assign(
        c: usize,
        acc: u64,
        remaining: &mut [usize],
        free: usize,
        g: ComponentsGraph,
        by_size: &[Vec<u64>],
        out: &mut Vec<u64>,
    ) {
        let left: usize = remaining.iter().sum();
        if left == 0 {
            out.push(acc);
            return;
        }
        if c == g.components {
            return;
        }
        // component c unused
        if free > left {
            assign(c + 1, acc, remaining, free - 1, g, by_size, out);
        }
        for i in 0..remaining.len() {
            if remaining[i] == 0 {
                continue;
            }
            remaining[i] -= 1;
            for &sub in &by_size[i + 1] {
                assign(
                    c + 1,
                    acc | sub << (c * g.clique_size),
                    remaining,
                    free - 1,
                    g,
                    by_size,
                    out,
                );
            }
            remaining[i] += 1;
        }
    }
    assign(0, 0, &mut remaining, g.components, g, &by_size, &mut out);
    out.sort_unstable();
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneralVerdict {
    pub m: usize,
    pub n: usize,
    pub signature: SignatureVector,
    /// Stars are taken at single vertices.
    pub star_convention: &'static str,
    /// `(component, vertex)`, 1-based, of the lowest largest star.
    pub star_center: (usize, usize),
    #[serde(flatten)]
    pub verdict: EkrVerdict,
}

/// Exact EKR verdict for `H^s(m, n)`.
pub fn ekr_check_general(g: ComponentsGraph, sig: &SignatureVector, opts: &VerdictOptions) -> Result<GeneralVerdict> {
    let masks = enumerate_signature_family(g, sig, opts.graph_cap)?;
    let verdict = ekr_verdict_masks(masks, g.vertex_count(), opts)?;
    let center = verdict.star_center as usize;
    Ok(GeneralVerdict {
        m: g.components,
        n: g.clique_size,
        signature: sig.clone(),
        star_convention: "vertex",
        star_center: (center / g.clique_size + 1, center % g.clique_size + 1),
        verdict,
    })
}

/// One line of a threshold table.
#[derive(Clone, Debug, Serialize)]
pub struct ThresholdRow {
    pub m: usize,
    pub n: usize,
    pub signature: String,
    pub family_size: usize,
    pub star_size_max: usize,
    pub max_intersecting: usize,
    pub ekr: bool,
    pub strongly_ekr: Strong,
}

impl From<&GeneralVerdict> for ThresholdRow {
    fn from(v: &GeneralVerdict) -> ThresholdRow {
        ThresholdRow {
            m: v.m,
            n: v.n,
            signature: v.signature.to_string(),
            family_size: v.verdict.family_size,
            star_size_max: v.verdict.star_size,
            max_intersecting: v.verdict.max_size,
            ekr: v.verdict.ekr,
            strongly_ekr: v.verdict.strongly_ekr,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdScan {
    pub rows: Vec<ThresholdRow>,
    /// First clique size of a run of `PERSISTENCE` consecutive EKR
    /// verdicts. A heuristic, not a proven threshold.
    pub heuristic_threshold: Option<usize>,
    /// Why the scan ended before finding a run, if it did.
    pub stopped: Option<String>,
}

pub const PERSISTENCE: usize = 3;

/// Scans clique sizes `n` from the smallest the signature fits in up to
/// `n_max`, stopping after `PERSISTENCE` consecutive EKR verdicts or at the
/// first instance past the solver caps.
pub fn threshold_scan(m: usize, sig: &SignatureVector, n_max: usize, opts: &VerdictOptions) -> Result<ThresholdScan> {
    let mut rows = Vec::new();
    let mut run = 0;
    let mut stopped = None;
    for n in sig.max_clique()..=n_max {
        let g = match ComponentsGraph::new(m, n) {
            Ok(g) => g,
            Err(e) => {
                stopped = Some(e.to_string());
                break;
            }
        };
        let v = match ekr_check_general(g, sig, opts) {
            Ok(v) => v,
            Err(e @ Error::CapExceeded { .. }) => {
                stopped = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        if !v.verdict.exact {
            stopped = Some(format!("n = {n}: solver limit reached"));
            rows.push(ThresholdRow::from(&v));
            break;
        }
        run = if v.verdict.ekr { run + 1 } else { 0 };
        rows.push(ThresholdRow::from(&v));
        if run == PERSISTENCE {
            return Ok(ThresholdScan {
                heuristic_threshold: Some(n + 1 - PERSISTENCE),
                rows,
                stopped: None,
            });
        }
    }
    Ok(ThresholdScan {
        rows,
        heuristic_threshold: None,
        stopped: stopped.or_else(|| Some(format!("reached n_max = {n_max}"))),
    })
}

/// Number of the component holding bit `slot`, and the vertex inside it.
pub fn locate(g: ComponentsGraph, slot: usize) -> Result<(usize, usize)> {
    if slot >= g.vertex_count() {
        return Err(Error::InvalidVertex(format!(
            "bit {slot} outside G_{{{},{}}}",
            g.components, g.clique_size
        )));
    }
    Ok((slot / g.clique_size, slot % g.clique_size))
}
