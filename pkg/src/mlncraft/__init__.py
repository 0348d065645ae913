"""Decoupled community and hub analysis of multilayer networks."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .analysis import (
    CentralityScores,
    HubSet,
    centrality,
    community_hubs,
    detect_communities,
    layer_hubs,
    load_communities,
    louvain,
    modularity,
)
from .cbg import (
    CommunityBipartiteGraph,
    apply_metric,
    build_cbg,
    register_metric,
    weight_wd,
    weight_we,
    weight_wh,
)
from .errors import MLNError
from .homln import (
    compose_communities_and,
    compose_hub_sets,
    compose_layers,
    parse_expr,
    rank_layers_by_avg_degree,
)
from .kcommunity import (
    KCommunityElement,
    KCommunityResult,
    LayerOrdering,
    k_community,
    parse_ordering,
    rank_elements,
    two_community,
)
from .matching import Matching, WeightedBipartite, brute_force_matching, max_weight_matching
from .model import (
    Community,
    CommunitySet,
    InterLayerEdgeSet,
    Layer,
    MultilayerNetwork,
    build_network,
    induced_subgraph,
    inter_edges_between,
)
