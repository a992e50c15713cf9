"""Lexicon-constrained CTC decoding, evaluation metrics, and a small
service/CLI around them."""

from importlib import metadata

from .ctc import (
    Alphabet,
    LogitMatrix,
    ProbMatrix,
    best_path_decode,
    best_path_probability,
    collapse,
    enumerate_decode,
    enumerate_labeling_distribution,
    labeling_probability,
    softmax_rows,
)
from .errors import CapExceededError, InputError, UndefinedMetricError
from .lexicon import Corpus, PrefixTree, WordCharSet, build_tree, tokenize
from .metrics import (
    EvalPair,
    ImprovementReport,
    MetricReport,
    cer,
    improvement,
    improvement_report,
    levenshtein,
    wer,
)
from .wbs import (
    Beam,
    DecodeConfig,
    allowed_extensions,
    exhaustive_lexicon_decode,
    legal_labelings,
    select_beam,
    wbs_decode,
    wbs_search,
)
from .pipeline import (
    LineRecord,
    ParagraphRecord,
    ParagraphTranscript,
    RunReport,
    VariantReport,
    compare_decoders,
    corpus_experiment,
    corpus_table_csv,
    decode_line,
    decode_paragraph,
    decode_run,
    evaluate_run,
    run_report_csv,
)
from .client import ServiceClient, ServiceError

try:
    __version__ = metadata.version("lexidecode")
except metadata.PackageNotFoundError:
    __version__ = "0.0.0"

__all__ = [
    "Alphabet",
    "Beam",
    "CapExceededError",
    "Corpus",
    "DecodeConfig",
    "EvalPair",
    "ImprovementReport",
    "InputError",
    "LineRecord",
    "LogitMatrix",
    "MetricReport",
    "ParagraphRecord",
    "ParagraphTranscript",
    "PrefixTree",
    "ProbMatrix",
    "RunReport",
    "ServiceClient",
    "ServiceError",
    "UndefinedMetricError",
    "VariantReport",
    "WordCharSet",
    "allowed_extensions",
    "best_path_decode",
    "best_path_probability",
    "build_tree",
    "cer",
    "collapse",
    "compare_decoders",
    "corpus_experiment",
    "corpus_table_csv",
    "decode_line",
    "decode_paragraph",
    "decode_run",
    "enumerate_decode",
    "enumerate_labeling_distribution",
    "evaluate_run",
    "exhaustive_lexicon_decode",
    "improvement",
    "improvement_report",
    "labeling_probability",
    "legal_labelings",
    "levenshtein",
    "run_report_csv",
    "select_beam",
    "softmax_rows",
    "tokenize",
    "wbs_decode",
    "wbs_search",
    "wer",
]
