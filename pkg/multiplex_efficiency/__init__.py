"""
multiplex_efficiency: path lengths, global efficiency and edge strengthening on
multiplex networks where changing layer costs a fixed amount gamma.
"""

from .analysis import (EfficiencyReport, RedundancyReport, RedundantEdge, efficiency_report,
                       efficiency_table, global_k_efficiency, harmonic_centralities,
                       reciprocal_matrix, redundancy_scan, redundant_edges)
from .config import RunConfig, load_run_config
from .data_loader import EdgeRecord, load_labels, load_multiplex, write_multiplex
from .errors import (ConfigError, DataFormatError, InvalidNetworkError, MultiplexError,
                     NumericalError, PerronConvergenceError, ReducibleMatrixError,
                     SelectionError, UsageError)
from .network import (AggregateStructure, MultiplexNetwork, PathTensor, SupraMatrix,
                      SwitchCost, aggregate, build_path_tensor, supra_matrix,
                      transpose_network)
from .paths import (DiameterReport, KPathResult, LayerStateSolver, diameter, iter_k_paths,
                    k_path_gamma, k_path_minplus_power, one_path_matrix, path_length_matrix,
                    supra_dijkstra_oracle)
from .perturbation import (PerronTriple, Recommendation, apply_strengthening,
                           efficiency_profile, enhancement_report, lower_bound_chain,
                           perron_triple, select_edge_harmonic, select_edge_perron)

__version__ = "1.0.0"
