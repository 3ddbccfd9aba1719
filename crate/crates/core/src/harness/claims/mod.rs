//! Registered claims: each sweeps a parameter grid, evaluates both sides of an
//! inequality or identity and judges the rows with a fixed tolerance policy.

mod identities;
mod majorization;
mod trends;
mod weak_claim;

use super::config::{ClaimParams, ExperimentConfig};
use super::report::{ClaimReport, GroupReport};
use crate::commutator::CommutatorParams;
use crate::error::{CzError, Result};
use crate::grid::GridSpec;
use crate::harness::fields::AField;
use crate::kernels::KernelSpec;

pub(crate) struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub p: ClaimParams,
}

impl Ctx<'_> {
    pub fn seed(&self) -> u64 {
        self.cfg.seed
    }

    /// Angular exponent for nets in dimension `d`: the configured override, or
    /// `0.5` in 2D and `0.25` in 3D, which keeps 3D nets below the size guard.
    pub fn gamma_for(&self, d: usize) -> f64 {
        self.p.gamma.unwrap_or(if d == 2 { 0.5 } else { 0.25 })
    }

    pub fn kernel(&self, d: usize) -> Result<KernelSpec> {
        if d == self.cfg.grid.d {
            self.cfg.kernel_spec()
        } else {
            KernelSpec::from_id("riesz-x1", d)
        }
    }

    /// Operator data on `spec` with a random-sign field and `m_s` large enough for `n`.
    pub fn operator(&self, spec: &GridSpec, seed: u64, n: u32) -> Result<CommutatorParams> {
        let a = AField::RandomSigns { seed, block: 1 }.sample(spec)?;
        let m_s = self.cfg.m_s.max(8 * (n as usize).pow(2));
        Ok(CommutatorParams::new(self.kernel(spec.d)?, a, m_s, spec.h())?.with_mollify(self.cfg.mollify))
    }
}

pub(crate) struct Outcome {
    pub groups: Vec<GroupReport>,
    pub note: String,
}

type Verifier = fn(&Ctx) -> Result<Outcome>;

pub struct ClaimInfo {
    pub id: &'static str,
    pub description: &'static str,
    verifier: Verifier,
}

const REGISTRY: &[ClaimInfo] = &[
    ClaimInfo {
        id: "partition-unity",
        description: "sum over the net of chi_{n,nu}(x) equals 1 at random points",
        verifier: identities::partition_unity,
    },
    ClaimInfo {
        id: "kernel-telescoping",
        description: "sum_j K_j equals K on the range covered by the dyadic pieces",
        verifier: identities::kernel_telescoping,
    },
    ClaimInfo {
        id: "lp-telescoping",
        description: "V_m + sum_k Lambda_k is the identity and Lambda_k Lambda~_k = Lambda_k",
        verifier: identities::lp_telescoping,
    },
    ClaimInfo {
        id: "sector-sum",
        description: "sum over nu of T_j^{n,nu} f equals T_j^n f",
        verifier: identities::sector_sum,
    },
    ClaimInfo {
        id: "czd-invariants",
        description: "Calderon-Zygmund decompositions of random and planted inputs satisfy every invariant",
        verifier: identities::czd_invariants,
    },
    ClaimInfo {
        id: "chebyshev",
        description: "lambda |{|g| > lambda}| <= ||g||_1 for good parts and operator outputs",
        verifier: identities::chebyshev,
    },
    ClaimInfo {
        id: "support-locality",
        description: "T_j B_m vanishes off the exceptional set when m >= j + 1",
        verifier: identities::support_locality,
    },
    ClaimInfo {
        id: "kjn-l1-error",
        description: "||K_j - K_j^n||_1 2^{l_eps(n) eps} stays bounded in n",
        verifier: trends::kjn_l1_error,
    },
    ClaimInfo {
        id: "tjn-gap",
        description: "the L1 -> L1 gap of T_j - T_j^n decays like n^-2",
        verifier: trends::tjn_gap,
    },
    ClaimInfo {
        id: "low-pass-atom",
        description: "||P_{j-n+l(n)} T_j^n b_Q||_1 <~ n^-2 log n ||b_Q||_1 for atoms of side 2^{j-n}",
        verifier: trends::low_pass_atom,
    },
    ClaimInfo {
        id: "net-cardinality",
        description: "card of the direction net is comparable to 2^{n gamma (d-1)}",
        verifier: trends::net_cardinality,
    },
    ClaimInfo {
        id: "sector-overlap",
        description: "overlap of the n^-5 sector multipliers grows like 2^{n gamma (d-2)} n^5",
        verifier: trends::sector_overlap,
    },
    ClaimInfo {
        id: "sector-l2-trend",
        description: "fixed-direction ||T_j^{n,nu} B||_2^2 against 2^{-2 n gamma (d-1)} lambda ||f||_1",
        verifier: trends::sector_l2_trend,
    },
    ClaimInfo {
        id: "tube-majorization",
        description: "|(I - P_{j-n+l(n)}) T_j^{n,nu} B_{j-n}| <= C H_j^{n,nu} * |B_{j-n}| pointwise",
        verifier: majorization::tube_majorization,
    },
    ClaimInfo {
        id: "weak-type-stability",
        description: "the weak-type ratio is amplitude invariant and stable as the input bump narrows",
        verifier: weak_claim::weak_type_stability,
    },
];

pub fn registry() -> &'static [ClaimInfo] {
    REGISTRY
}

pub fn registered_ids() -> Vec<&'static str> {
    REGISTRY.iter().map(|c| c.id).collect()
}

const EXTRAPOLATION: &str =
    "finite sweep at desk scale; the asymptotic regime n >= n(eps) is extrapolated, not attained";

pub fn verify_claim(id: &str, config: &ExperimentConfig) -> Result<ClaimReport> {
    let info = REGISTRY.iter().find(|c| c.id == id).ok_or_else(|| CzError::UnknownClaim {
        id: id.to_string(),
        registered: registered_ids().into_iter().map(String::from).collect(),
    })?;
    let ctx = Ctx { cfg: config, p: config.claim_params(id) };
    let out = (info.verifier)(&ctx)?;
    let note = if out.note.is_empty() { EXTRAPOLATION.to_string() } else { format!("{}; {EXTRAPOLATION}", out.note) };
    Ok(ClaimReport::new(info.id, info.description, out.groups, &note, config.hash()))
}
