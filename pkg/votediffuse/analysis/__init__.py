from .consensus import discussion_graph, pair_graph, consensus_report, verify_component_consensus,\
    conservation_audit, ConsensusClass, ConsensusReport, ComponentCheck, ConsensusVerification
from .certificates import topk_certificate, pair_discussion_sets, TopKCertificate
from ..graphs import connected_components
