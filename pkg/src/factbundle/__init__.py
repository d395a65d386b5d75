"""Signed, spot-checkable fact bundles over provenance graphs.

A publisher turns a claim and its source documents into a compact signed
bundle: consistency constraints derived from the provenance graph are
replicated, committed under a Merkle root, and signed. A verifier checks the
signature and a handful of randomly sampled constraints — constant human
effort regardless of graph size — while an unequipped checker faces a query
burden that grows quadratically with the number of sources. The simulate and
vca modules measure both sides of that asymmetry.
"""

from .bundle import (
    Bundle,
    BundleMeta,
    KeyPair,
    LeafPackage,
    QuerySpec,
    build_bundle,
    parse_bundle,
    registry_from_json,
    registry_to_json,
    sample_queries,
    serialize_bundle,
    signed_region_bytes,
    signed_region_span,
)
from .commit import (
    InclusionProof,
    MerkleTree,
    build_tree,
    prove_inclusion,
    verify_inclusion,
)
from .encode import (
    Constraint,
    ConstraintSystem,
    EncodedConstraints,
    EncodingParams,
    Leaf,
    derive_constraints,
    encode_redundant,
    evaluate_leaf,
)
from .errors import FactBundleError
from .provenance import (
    CITATION,
    DERIVATION,
    Claim,
    Edge,
    ProvenanceDAG,
    SourceDoc,
    build_dag,
    dag_digest,
)
from .simulate import (
    STRATEGIES,
    Oracle,
    QueryBudgetResult,
    World,
    WorldParams,
    estimate_advantage,
    plant_world,
    queries_for_advantage,
)
from .tamper import tamper_bundle, tampered_bundle
from .vca import (
    CostModel,
    CostReport,
    Population,
    ScenarioScript,
    case_study,
    expected_cost,
    vca_ratio,
)
from .verify import (
    Verdict,
    VerifyPolicy,
    choose_k,
    count_human_steps,
    verify_bundle,
)

__version__ = "0.1.0"

__all__ = [
    "Bundle",
    "BundleMeta",
    "CITATION",
    "Claim",
    "Constraint",
    "ConstraintSystem",
    "CostModel",
    "CostReport",
    "DERIVATION",
    "Edge",
    "EncodedConstraints",
    "EncodingParams",
    "FactBundleError",
    "InclusionProof",
    "KeyPair",
    "Leaf",
    "LeafPackage",
    "MerkleTree",
    "Oracle",
    "Population",
    "ProvenanceDAG",
    "QueryBudgetResult",
    "QuerySpec",
    "STRATEGIES",
    "ScenarioScript",
    "SourceDoc",
    "Verdict",
    "VerifyPolicy",
    "World",
    "WorldParams",
    "build_bundle",
    "build_dag",
    "build_tree",
    "case_study",
    "choose_k",
    "count_human_steps",
    "dag_digest",
    "derive_constraints",
    "encode_redundant",
    "estimate_advantage",
    "evaluate_leaf",
    "expected_cost",
    "parse_bundle",
    "plant_world",
    "prove_inclusion",
    "queries_for_advantage",
    "registry_from_json",
    "registry_to_json",
    "sample_queries",
    "serialize_bundle",
    "signed_region_bytes",
    "signed_region_span",
    "tamper_bundle",
    "tampered_bundle",
    "vca_ratio",
    "verify_bundle",
    "verify_inclusion",
]
