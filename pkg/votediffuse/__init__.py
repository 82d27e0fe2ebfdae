from .profile import OpinionProfile, PairEvent, SubjectSet, AggregateProfile, apply_step,\
    column_average, borda_ranking, top_k_set, mixing_matrix, is_doubly_stochastic, envelope
from .pairs import PairDistribution, PairSchedule, PairSource, IIDPairSource,\
    ScriptedPairSource, CallbackPairSource, sample_iid, next_scripted, connectivity_graph
from .subjects import SubjectPolicy, full_subjects, topk_subjects, binomial_subjects,\
    hk_subjects, scripted_subjects
from .graphs import AgentGraph, connected_components
from .engine import SimulationConfig, Trace, StepRecord, run, replay, run_batch,\
    has_converged, generate_initial_profile
from .errors import VoteDiffuseError, DimensionError, ParameterError, ScheduleExhaustedError,\
    ConfigError, ParseError, CorruptTraceError, PolicyMismatchError, UnknownSuiteError
from .logger import setup_logging
__version__ = '1.0.0'
