from .load_data import load_schedule, load_subject_script, load_profile_csv, parse_schedule,\
    parse_subject_script
from .trace_io import write_trace, load_trace, parse_trace, write_trace_npz, load_trace_npz
from .config_file import load_config, parse_config, DEFAULTS
from .reports import format_report, write_text_report, write_component_csv, write_consensus_csv,\
    write_spread_csv, spread_series
