//! Finite generalized metric spaces with exact extended-rational distances,
//! and the approximate (ε-) category theory they carry: ε-homotopy,
//! ε-pushouts and ε-colimits through semimetric reflection, ε-injectivity and
//! ε-purity testers with a law harness, and a chain construction of finite
//! approximants to the rational Urysohn space with an exact saturation audit.

pub mod budget;
pub mod canon;
pub mod colimit;
pub mod construct;
pub mod corpus;
pub mod extrat;
pub mod fraisse;
pub mod grid;
pub mod hom;
pub mod injectivity;
pub mod io;
pub mod laws;
pub mod morphism;
pub mod purity;
pub mod space;
pub mod verify;

pub use budget::{Budget, BudgetExceeded};
pub use canon::{are_isometric, canonical_form, Canonical};
pub use colimit::{
    comparison, cylinder, eps_coequalizer, eps_colimit, eps_pushout, pushout, reflect, Arrow, ColimitError, Cylinder, EpsCoequalizer,
    EpsColimit, EpsPushout, FinDiagram, Reflection, Semimetric, SemimetricError,
};
pub use construct::{coproduct, product, Coproduct, Product};
pub use extrat::{ExtRat, ExtRatError};
pub use fraisse::{
    audit_saturation, build_chain, chain_step, distances_are_grid_sums, read_run, step_spans, stratum_of, write_run, AuditReport,
    CatalogEntry, Chain, ChainBudget, ChainError, ChainStage, IsometryCatalog, MissingExtension, RunError, SpanPolicy, SpanRecord,
    StageAudit, Step,
};
pub use grid::{enumerate_spaces, DistanceGrid, GridError};
pub use hom::{automorphisms, hom_set, isometries, HomSearch, MapKind};
pub use injectivity::{
    check_eps_grid, inj_class, injectivity_gap, is_approx_injective, is_eps_injective, is_eps_mono, is_eps_mono_default, is_eps_split,
    ApproxError, ApproxReport, GridOrderError, InjReport, InjVerdict, MonoWitness, TestFamily,
};
pub use io::{to_json, Document, SchemaError};
pub use laws::{law_harness, LawConfig, LawOutcome, LawReport, LAWS};
pub use morphism::{hom_dist, is_eps_homotopic, is_isometry, MetMap, MorphismError};
pub use purity::{grid_purity, purity, PurityVerdict, Square, Variant};
pub use space::{InvalidSpace, Space, SpaceViolation};
pub use verify::{
    verify_cocone, verify_coequalizer, verify_colimit, verify_universal, CoconeShape, Constraint, Counterexample, UniversalReport,
    VerifyError,
};
