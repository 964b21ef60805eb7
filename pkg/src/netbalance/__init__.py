"""Balance analysis for reversible reaction networks and Markov chains.

Decides detailed balance, complex balance, formal balance, and the cycle
balance variants by building the mixed graph a state (or measure) induces on
the underlying network and running graph-theoretic balance and cycle tests.
"""

from .balance import (
    BalanceReport,
    InternalInconsistencyError,
    ModeMismatchError,
    balance_report,
    check_complex_balance,
    check_cycle_balance,
    check_detailed_balance,
    check_formal_balance,
    check_strong_cycle_balance,
    check_weak_complex_balance,
    evaluate_rates,
    evaluate_rates_table,
    induced_graph,
    wegscheider_conditions,
)
from .equilibrium import (
    EquilibriumResult,
    classify_state_oracle,
    find_equilibrium,
    formation_rate,
)
from .markov import (
    MarkovChainModel,
    Measure,
    build_birth_death,
    build_cyclic_mc,
    is_reversible,
    is_stationary,
    kolmogorov_cycle_check,
    make_markov_chain,
    make_measure,
    mc_induced_graph,
    reversibility_verdict,
)
from .mixedgraph import (
    Cycle,
    MixedGraph,
    enumerate_directed_cycles,
    find_directed_cycle,
    find_weakly_directed_cycle,
    is_edge_balanced,
    is_vertex_balanced,
    make_mixed_graph,
    to_dot,
)
from .network import (
    NetworkSummary,
    ReactionNetwork,
    make_network,
    network_summary,
    parse_network,
    serialize_network,
    stoichiometric_matrix,
)
from .numeric import Tolerance

__version__ = "0.1.0"
