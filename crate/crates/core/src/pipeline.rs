//! End-to-end witness computation: given a commensurability class (a form of
//! signature (m,1)) and a target property, produce the flat cross-section
//! data and the form-theoretic certificate tying them together.
//!
//! Certificates are plain JSON with every number carried exactly (rationals
//! as strings). Every stored boolean is re-derivable from the stored raw data
//! by the other modules; `verify_certificate` does exactly that and reports
//! each field that fails to reproduce.

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{parse_rational, rat_int};
use crate::bieberbach::{
    closure, ghw_search, im_kim, is_diagonal_holonomy, is_ghw, is_orientable, is_torsion_free,
    preserves_form, product_with_circle, topology_flags, AffineIsometry, CrystalPresentation,
    GroupClosure,
};
use crate::equivalence::{projectively_equivalent, ProjectiveVerdict};
use crate::error::{Error, Result};
use crate::forms::DiagonalForm;
use crate::local::{profile, InvariantProfile};
use crate::matrix::{Matrix, Vector};
use crate::realization::{definite_complement, serre_feasible, TargetProfile};

pub const CERTIFICATE_SCHEMA: u32 = 1;

/// Default candidate budget for the GHW search.
pub const DEFAULT_GHW_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CuspProperty {
    StiefelWhitney,
    SpinC,
}

impl CuspProperty {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sw" | "stiefel-whitney" => Ok(CuspProperty::StiefelWhitney),
            "spinc" | "spin-c" => Ok(CuspProperty::SpinC),
            other => Err(Error::Parse {
                offset: 0,
                message: format!("unknown property {other:?}: expected \"sw\" or \"spinc\""),
            }),
        }
    }

    fn as_str(&self) -> &'static str {
        match self {
            CuspProperty::StiefelWhitney => "sw",
            CuspProperty::SpinC => "spinc",
        }
    }
}

#[derive(Debug, Clone)]
pub struct WitnessOptions {
    pub ghw_bound: u64,
    /// Use this positive definite diagonal form as the complement instead of
    /// the canonical realization; it must carry the canonical target profile.
    pub complement_override: Option<DiagonalForm>,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            ghw_bound: DEFAULT_GHW_BOUND,
            complement_override: None,
        }
    }
}

// ---------------------------------------------------------------------------
// JSON shapes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileJson {
    pub rank: usize,
    pub sig: [usize; 2],
    pub disc: String,
    pub neg_places: Vec<String>,
}

impl From<&InvariantProfile> for ProfileJson {
    fn from(p: &InvariantProfile) -> Self {
        ProfileJson {
            rank: p.rank,
            sig: [p.signature.pos, p.signature.neg],
            disc: p.discriminant.to_string(),
            neg_places: p.negative_places.iter().map(|v| v.to_string()).collect(),
        }
    }
}

impl From<&TargetProfile> for ProfileJson {
    fn from(t: &TargetProfile) -> Self {
        ProfileJson {
            rank: t.rank,
            sig: [t.signature.pos, t.signature.neg],
            disc: t.discriminant.to_string(),
            neg_places: t.negative_places.iter().map(|v| v.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorJson {
    #[serde(rename = "A")]
    pub a: Vec<String>,
    pub v: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationJson {
    pub dimension: usize,
    pub generators: Vec<GeneratorJson>,
    pub seed_lattice: Vec<Vec<String>>,
}

impl PresentationJson {
    pub fn from_presentation(p: &CrystalPresentation) -> Self {
        let rat_row = |v: &Vector| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        PresentationJson {
            dimension: p.dimension,
            generators: p
                .generators
                .iter()
                .map(|g| GeneratorJson {
                    a: g.linear.rows.iter().flat_map(|r| rat_row(r)).collect(),
                    v: rat_row(&g.translation),
                })
                .collect(),
            seed_lattice: p.seed_lattice.iter().map(|r| rat_row(r)).collect(),
        }
    }

    pub fn to_presentation(&self) -> Result<CrystalPresentation> {
        let n = self.dimension;
        let parse_vec = |xs: &[String]| -> Result<Vector> {
            xs.iter().map(|x| parse_rational(x)).collect()
        };
        let mut generators = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            if g.a.len() != n * n || g.v.len() != n {
                return Err(Error::BadCertificate(format!(
                    "generator has {} matrix entries and {} vector entries for dimension {n}",
                    g.a.len(),
                    g.v.len()
                )));
            }
            let flat = parse_vec(&g.a)?;
            let rows: Vec<Vector> = flat.chunks(n).map(|c| c.to_vec()).collect();
            generators.push(AffineIsometry::new(Matrix::new(rows), parse_vec(&g.v)?)?);
        }
        let seed: Result<Vec<Vector>> = self
            .seed_lattice
            .iter()
            .map(|r| {
                if r.len() != n {
                    return Err(Error::BadCertificate(
                        "seed lattice row has wrong length".into(),
                    ));
                }
                parse_vec(r)
            })
            .collect();
        CrystalPresentation::new(n, generators, seed?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub kind: String,
    pub parameter: usize,
    pub circled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagsJson {
    pub sw_nonvanishing_range: Option<usize>,
    pub sw_citation: Option<String>,
    pub spinc_obstructed: bool,
    pub spinc_citation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatJson {
    pub family: FamilyJson,
    pub presentation: PresentationJson,
    pub holonomy_order: usize,
    pub holonomy_rank: Option<usize>,
    pub torsion_free: bool,
    pub orientable: bool,
    pub diagonal_holonomy: bool,
    pub ghw: bool,
    pub preserves_complement_form: bool,
    pub flags: FlagsJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementJson {
    pub target: ProfileJson,
    pub form: String,
    pub profile: ProfileJson,
    pub extended_profile: ProfileJson,
    pub profiles_equal: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionJson {
    pub place: String,
    pub invariant: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub equivalent: bool,
    pub witness: Option<String>,
    pub obstruction: Option<ObstructionJson>,
}

impl From<&ProjectiveVerdict> for VerdictJson {
    fn from(v: &ProjectiveVerdict) -> Self {
        VerdictJson {
            equivalent: v.equivalent,
            witness: v.scalar_witness.as_ref().map(|c| c.to_string()),
            obstruction: v.obstruction.as_ref().map(|o| ObstructionJson {
                place: o.place.to_string(),
                invariant: o.invariant.to_string(),
            }),
        }
    }
}

/// The end-to-end record of one witness computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommensurabilityCertificate {
    pub schema: u32,
    pub m: usize,
    pub property: String,
    pub form: String,
    pub form_profile: ProfileJson,
    pub flat: FlatJson,
    pub complement: ComplementJson,
    pub equivalence: VerdictJson,
    pub citations: BTreeMap<String, String>,
}

impl CommensurabilityCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

const COMPLEMENT_NOTE: &str = "equal profiles certify rational equivalence of the extended \
form and the input; projective equivalence with scalar 1 follows";

fn standard_citations() -> BTreeMap<String, String> {
    let mut c = BTreeMap::new();
    c.insert(
        "commensurability".to_string(),
        "[MA]: cusped arithmetic hyperbolic manifolds of simplest type are commensurable iff \
their defining forms are projectively equivalent"
            .to_string(),
    );
    c.insert(
        "cusp_embedding".to_string(),
        "[LRcusps]+[McR]: a closed flat (m-1)-manifold whose holonomy preserves f occurs as a \
cusp cross-section of infinitely many orientable arithmetic hyperbolic m-manifolds attached to \
SO(f + <1,-1>, Z)"
            .to_string(),
    );
    c.insert(
        "scaling".to_string(),
        "[LRcusps]: the integral scaling step may replace f + <1,-1> by a projectively \
equivalent form, staying in the same commensurability class"
            .to_string(),
    );
    c
}

/// Standalone report for the `complement` operation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementReport {
    pub input: String,
    pub input_profile: ProfileJson,
    pub target: ProfileJson,
    pub form: String,
    pub profile: ProfileJson,
    pub extended_profile: ProfileJson,
    pub profiles_equal: bool,
    pub note: String,
}

impl ComplementReport {
    pub fn from_certificate(c: &crate::realization::ComplementCertificate) -> Self {
        ComplementReport {
            input: c.input.to_string(),
            input_profile: ProfileJson::from(&c.input_profile),
            target: ProfileJson::from(&c.target),
            form: c.complement.to_string(),
            profile: ProfileJson::from(&c.complement_profile),
            extended_profile: ProfileJson::from(&c.extended_profile),
            profiles_equal: c.profiles_equal,
            note: COMPLEMENT_NOTE.to_string(),
        }
    }
}

/// Report for `flat check`: the closure plus every predicate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatCheckReport {
    pub dimension: usize,
    pub holonomy_order: usize,
    pub holonomy_rank: Option<usize>,
    pub lattice_basis: Vec<Vec<String>>,
    pub torsion_free: bool,
    pub torsion_witness: Option<String>,
    pub orientable: bool,
    pub diagonal_holonomy: bool,
    pub ghw: bool,
    pub flags: FlagsJson,
}

/// Run the closure and all predicates over a presentation.
pub fn flat_check(p: &CrystalPresentation) -> Result<FlatCheckReport> {
    let c = closure(p)?;
    let (torsion_free, witness) = is_torsion_free(&c);
    let flags = topology_flags(&c);
    Ok(FlatCheckReport {
        dimension: c.dimension,
        holonomy_order: c.holonomy_order(),
        holonomy_rank: c.elementary_abelian_rank(),
        lattice_basis: c
            .lattice
            .basis()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect(),
        torsion_free,
        torsion_witness: witness.map(|w| {
            format!(
                "element with linear part {:?} and translation {:?} fixes {:?}",
                w.element
                    .linear
                    .rows
                    .iter()
                    .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                w.element
                    .translation
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>(),
                w.fixed_point
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
            )
        }),
        orientable: c
            .cosets
            .keys()
            .all(|a| a.det() == num_rational::BigRational::one()),
        diagonal_holonomy: is_diagonal_holonomy(&c),
        ghw: is_ghw(&c),
        flags: FlagsJson {
            sw_nonvanishing_range: flags.sw_nonvanishing_range,
            sw_citation: flags.sw_citation,
            spinc_obstructed: flags.spinc_obstructed,
            spinc_citation: flags.spinc_citation,
        },
    })
}

// ---------------------------------------------------------------------------
// Witness computation
// ---------------------------------------------------------------------------

struct FlatChoice {
    family: FamilyJson,
    presentation: CrystalPresentation,
}

fn choose_flat(m: usize, property: CuspProperty, bound: u64) -> Result<FlatChoice> {
    match property {
        CuspProperty::StiefelWhitney => {
            if m % 2 == 0 {
                let n = (m - 2) / 2;
                Ok(FlatChoice {
                    family: FamilyJson {
                        kind: "im-kim".into(),
                        parameter: n,
                        circled: false,
                    },
                    presentation: im_kim(n)?,
                })
            } else {
                let n = (m - 3) / 2;
                Ok(FlatChoice {
                    family: FamilyJson {
                        kind: "im-kim".into(),
                        parameter: n,
                        circled: true,
                    },
                    presentation: product_with_circle(&im_kim(n)?),
                })
            }
        }
        CuspProperty::SpinC => {
            let dim = if m % 2 == 0 { m - 1 } else { m - 2 };
            let base = ghw_search(dim, bound)?.ok_or(Error::SearchExhausted {
                examined: bound,
                bound,
            })?;
            let circled = m % 2 == 1;
            Ok(FlatChoice {
                family: FamilyJson {
                    kind: "ghw".into(),
                    parameter: dim,
                    circled,
                },
                presentation: if circled {
                    product_with_circle(&base)
                } else {
                    base
                },
            })
        }
    }
}

/// Compute the full Theorem-style witness certificate for a form of signature
/// (m,1), m >= 6.
pub fn cusp_witness(
    m: usize,
    q: &DiagonalForm,
    property: CuspProperty,
    opts: &WitnessOptions,
) -> Result<CommensurabilityCertificate> {
    if m < 6 {
        return Err(Error::BelowMinimum {
            minimum: 6,
            found: m,
        });
    }
    let sig = q.signature();
    if sig.pos != m || sig.neg != 1 {
        return Err(Error::SignatureMismatch {
            expected_pos: m,
            expected_neg: 1,
            found_pos: sig.pos,
            found_neg: sig.neg,
        });
    }

    let flat = choose_flat(m, property, opts.ghw_bound)?;
    let c = closure(&flat.presentation)?;
    let (torsion_free, _) = is_torsion_free(&c);
    let orientable = is_orientable(&flat.presentation);
    let diagonal_holonomy = is_diagonal_holonomy(&c);
    let ghw = is_ghw(&c);
    let flags = topology_flags(&c);

    let (complement_form, comp) = match &opts.complement_override {
        None => definite_complement(q)?,
        Some(f) => {
            let (_, canonical) = definite_complement(q)?;
            let fp = profile(f);
            let want = &canonical.target;
            let target_profile = InvariantProfile {
                rank: want.rank,
                signature: want.signature,
                discriminant: want.discriminant.clone(),
                negative_places: want.negative_places.clone(),
            };
            if fp != target_profile {
                return Err(Error::BadCertificate(format!(
                    "supplied complement form {f} has profile {fp}, canonical target is {target_profile}"
                )));
            }
            let hyperbolic = DiagonalForm::new(vec![rat_int(1), rat_int(-1)])?;
            let extended = f.direct_sum(&hyperbolic);
            let extended_profile = profile(&extended);
            let input_profile = profile(q);
            let profiles_equal = extended_profile == input_profile;
            let cert = crate::realization::ComplementCertificate {
                input: q.clone(),
                input_profile,
                target: canonical.target.clone(),
                complement: f.clone(),
                complement_profile: fp,
                extended_profile,
                profiles_equal,
            };
            (f.clone(), cert)
        }
    };

    let preserves = preserves_form(&flat.presentation, &complement_form)?;
    let hyperbolic = DiagonalForm::new(vec![rat_int(1), rat_int(-1)])?;
    let extended = complement_form.direct_sum(&hyperbolic);
    let verdict = projectively_equivalent(q, &extended)?;

    Ok(CommensurabilityCertificate {
        schema: CERTIFICATE_SCHEMA,
        m,
        property: property.as_str().to_string(),
        form: q.to_string(),
        form_profile: ProfileJson::from(&comp.input_profile),
        flat: FlatJson {
            family: flat.family,
            presentation: PresentationJson::from_presentation(&flat.presentation),
            holonomy_order: c.holonomy_order(),
            holonomy_rank: c.elementary_abelian_rank(),
            torsion_free,
            orientable,
            diagonal_holonomy,
            ghw,
            preserves_complement_form: preserves,
            flags: FlagsJson {
                sw_nonvanishing_range: flags.sw_nonvanishing_range,
                sw_citation: flags.sw_citation,
                spinc_obstructed: flags.spinc_obstructed,
                spinc_citation: flags.spinc_citation,
            },
        },
        complement: ComplementJson {
            target: ProfileJson::from(&comp.target),
            form: comp.complement.to_string(),
            profile: ProfileJson::from(&comp.complement_profile),
            extended_profile: ProfileJson::from(&comp.extended_profile),
            profiles_equal: comp.profiles_equal,
            note: COMPLEMENT_NOTE.to_string(),
        },
        equivalence: VerdictJson::from(&verdict),
        citations: standard_citations(),
    })
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub mismatches: Vec<String>,
}

/// Recompute every derivable field of a certificate from its raw inputs and
/// compare; mismatches are enumerated, not short-circuited.
pub fn verify_certificate(cert: &CommensurabilityCertificate) -> VerificationReport {
    let mut mismatches = Vec::new();
    let mut push = |field: &str, detail: String| {
        mismatches.push(format!("{field}: {detail}"));
    };

    if cert.schema != CERTIFICATE_SCHEMA {
        push("schema", format!("unsupported schema {}", cert.schema));
    }

    let q = match DiagonalForm::parse(&cert.form) {
        Ok(q) => q,
        Err(e) => {
            push("form", format!("unparseable: {e}"));
            return VerificationReport {
                ok: false,
                mismatches,
            };
        }
    };

    let property = match CuspProperty::parse(&cert.property) {
        Ok(p) => Some(p),
        Err(_) => {
            push("property", format!("unknown property {:?}", cert.property));
            None
        }
    };

    if cert.m < 6 {
        push("m", format!("m = {} violates m >= 6", cert.m));
    }
    let sig = q.signature();
    if sig.pos != cert.m || sig.neg != 1 {
        push(
            "form",
            format!("signature {sig} does not match (m,1) = ({},1)", cert.m),
        );
    }

    let p = profile(&q);
    let pj = ProfileJson::from(&p);
    if pj != cert.form_profile {
        push("form_profile", format!("recomputed {pj:?}"));
    }

    // flat side
    match cert.flat.presentation.to_presentation() {
        Err(e) => push("flat.presentation", format!("unparseable: {e}")),
        Ok(presentation) => {
            if presentation.dimension + 2 != q.rank() {
                push(
                    "flat.presentation",
                    format!(
                        "dimension {} is not m-1 = {}",
                        presentation.dimension,
                        q.rank() - 2
                    ),
                );
            }
            if let Some(prop) = property {
                if let Err(e) = check_family(&cert.flat.family, &presentation, prop, cert.m) {
                    push("flat.family", e);
                }
            }
            match closure(&presentation) {
                Err(e) => push("flat.presentation", format!("closure failed: {e}")),
                Ok(c) => {
                    let (torsion_free, witness) = is_torsion_free(&c);
                    if torsion_free != cert.flat.torsion_free {
                        let detail = witness
                            .map(|w| {
                                format!(
                                    "torsion element with linear part {:?} fixing {:?}",
                                    w.element.linear.rows, w.fixed_point
                                )
                            })
                            .unwrap_or_else(|| "recomputed torsion-free".to_string());
                        push("flat.torsion_free", detail);
                    }
                    compare(&mut mismatches, "flat.holonomy_order", c.holonomy_order(), cert.flat.holonomy_order);
                    compare(
                        &mut mismatches,
                        "flat.holonomy_rank",
                        c.elementary_abelian_rank(),
                        cert.flat.holonomy_rank,
                    );
                    compare(
                        &mut mismatches,
                        "flat.orientable",
                        is_orientable(&presentation),
                        cert.flat.orientable,
                    );
                    compare(
                        &mut mismatches,
                        "flat.diagonal_holonomy",
                        is_diagonal_holonomy(&c),
                        cert.flat.diagonal_holonomy,
                    );
                    compare(&mut mismatches, "flat.ghw", is_ghw(&c), cert.flat.ghw);
                    let flags = topology_flags(&c);
                    compare(
                        &mut mismatches,
                        "flat.flags.sw_nonvanishing_range",
                        flags.sw_nonvanishing_range,
                        cert.flat.flags.sw_nonvanishing_range,
                    );
                    compare(
                        &mut mismatches,
                        "flat.flags.spinc_obstructed",
                        flags.spinc_obstructed,
                        cert.flat.flags.spinc_obstructed,
                    );
                    if let Some(prop) = property {
                        check_property_flags(&mut mismatches, prop, &flags, &c);
                    }
                    if let Ok(complement) = DiagonalForm::parse(&cert.complement.form) {
                        match preserves_form(&presentation, &complement) {
                            Ok(preserved) => compare(
                                &mut mismatches,
                                "flat.preserves_complement_form",
                                preserved,
                                cert.flat.preserves_complement_form,
                            ),
                            Err(e) => mismatches
                                .push(format!("flat.preserves_complement_form: {e}")),
                        }
                    }
                }
            }
        }
    }

    // complement side
    match DiagonalForm::parse(&cert.complement.form) {
        Err(e) => mismatches.push(format!("complement.form: unparseable: {e}")),
        Ok(complement) => {
            match definite_complement(&q) {
                Err(e) => mismatches.push(format!("complement.target: {e}")),
                Ok((_, canonical)) => {
                    let want = ProfileJson::from(&canonical.target);
                    if want != cert.complement.target {
                        mismatches.push(format!(
                            "complement.target: canonical target is {want:?}"
                        ));
                    }
                    let (feasible, violated) = serre_feasible(&canonical.target);
                    if !feasible {
                        mismatches.push(format!(
                            "complement.target: infeasible, conditions {violated:?}"
                        ));
                    }
                }
            }
            let cp = profile(&complement);
            let cpj = ProfileJson::from(&cp);
            if cpj != cert.complement.profile {
                mismatches.push(format!("complement.profile: recomputed {cpj:?}"));
            }
            if cpj != cert.complement.target {
                mismatches.push(
                    "complement.profile: does not match the stored target".to_string(),
                );
            }
            let hyperbolic = DiagonalForm::new(vec![rat_int(1), rat_int(-1)]).unwrap();
            let extended = complement.direct_sum(&hyperbolic);
            let ep = profile(&extended);
            let epj = ProfileJson::from(&ep);
            if epj != cert.complement.extended_profile {
                mismatches.push(format!(
                    "complement.extended_profile: recomputed {epj:?}"
                ));
            }
            compare(
                &mut mismatches,
                "complement.profiles_equal",
                ep == p,
                cert.complement.profiles_equal,
            );
            match projectively_equivalent(&q, &extended) {
                Err(e) => mismatches.push(format!("equivalence: {e}")),
                Ok(verdict) => {
                    let vj = VerdictJson::from(&verdict);
                    if vj != cert.equivalence {
                        mismatches.push(format!("equivalence: recomputed {vj:?}"));
                    }
                }
            }
        }
    }

    VerificationReport {
        ok: mismatches.is_empty(),
        mismatches,
    }
}

fn compare<T: PartialEq + std::fmt::Debug>(
    mismatches: &mut Vec<String>,
    field: &str,
    recomputed: T,
    stored: T,
) {
    if recomputed != stored {
        mismatches.push(format!(
            "{field}: stored {stored:?}, recomputed {recomputed:?}"
        ));
    }
}

fn check_family(
    family: &FamilyJson,
    presentation: &CrystalPresentation,
    property: CuspProperty,
    m: usize,
) -> std::result::Result<(), String> {
    match (family.kind.as_str(), property) {
        ("im-kim", CuspProperty::StiefelWhitney) => {
            let n = family.parameter;
            let expected_circled = m % 2 == 1;
            if family.circled != expected_circled {
                return Err(format!(
                    "circled = {} but m = {m} requires {}",
                    family.circled, expected_circled
                ));
            }
            let expected_n = if m % 2 == 0 { (m - 2) / 2 } else { (m - 3) / 2 };
            if n != expected_n {
                return Err(format!("parameter {n}, expected {expected_n} for m = {m}"));
            }
            let base = im_kim(n).map_err(|e| e.to_string())?;
            let expected = if family.circled {
                product_with_circle(&base)
            } else {
                base
            };
            if &expected != presentation {
                return Err("presentation is not the named family member".to_string());
            }
            Ok(())
        }
        ("ghw", CuspProperty::SpinC) => {
            let expected_dim = if m % 2 == 0 { m - 1 } else { m - 2 };
            if family.parameter != expected_dim {
                return Err(format!(
                    "parameter {}, expected {expected_dim} for m = {m}",
                    family.parameter
                ));
            }
            if family.circled != (m % 2 == 1) {
                return Err(format!(
                    "circled = {} inconsistent with m = {m}",
                    family.circled
                ));
            }
            Ok(())
        }
        (kind, _) => Err(format!(
            "family kind {kind:?} inconsistent with property {:?}",
            property
        )),
    }
}

fn check_property_flags(
    mismatches: &mut Vec<String>,
    property: CuspProperty,
    flags: &crate::bieberbach::TopologyFlags,
    c: &GroupClosure,
) {
    match property {
        CuspProperty::StiefelWhitney => {
            if flags.sw_nonvanishing_range.is_none() {
                mismatches.push(
                    "flat.flags: property sw but the closure is not an Im-Kim family member"
                        .to_string(),
                );
            }
        }
        CuspProperty::SpinC => {
            if !flags.spinc_obstructed {
                mismatches.push(
                    "flat.flags: property spinc but the closure carries no spin^C obstruction"
                        .to_string(),
                );
            }
            let ghw_dim = crate::bieberbach::strip_circle(c)
                .map(|s| s.dimension)
                .unwrap_or(c.dimension);
            if ghw_dim <= 3 {
                mismatches.push(format!(
                    "flat.flags: GHW dimension {ghw_dim} does not exceed 3"
                ));
            }
        }
    }
}
