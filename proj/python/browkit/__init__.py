"""Python bindings for browkit."""

from ._browkit import (
    BrowkitError,
    DegenerateError,
    IllConditionedError,
    InvalidArgument,
    IoError,
    ParseError,
    SchemaError,
    UnsupportedVersionError,
    deviation,
    euler_to_matrix,
    kabsch_rotation,
    load_trace,
    matrix_to_euler,
    normalize_time,
    point_to_line_distance,
    read_landmarks,
    run_command,
    run_scenario,
    student_t_two_sided_p,
    t_one_sample,
    t_welch,
)

__all__ = [
    "BrowkitError",
    "DegenerateError",
    "IllConditionedError",
    "InvalidArgument",
    "IoError",
    "ParseError",
    "SchemaError",
    "UnsupportedVersionError",
    "deviation",
    "euler_to_matrix",
    "kabsch_rotation",
    "load_trace",
    "matrix_to_euler",
    "normalize_time",
    "point_to_line_distance",
    "read_landmarks",
    "run_command",
    "run_scenario",
    "student_t_two_sided_p",
    "t_one_sample",
    "t_welch",
]
