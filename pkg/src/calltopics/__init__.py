"""Topic labeling for translated conversational speech.

The pipeline: segment calls into one-minute documents, featurize them as
l2-normalized tf-idf over a document-frequency-filtered vocabulary, factorize
with nonnegative multiplicative updates, and label new documents by argmax
of their inferred topic mixture against the frozen topic-term matrix. Silver
labels (the model applied to clean reference text) stand in for human
annotation when scoring labels inferred from noisier translations.
"""

from .bleu import BleuScore, corpus_bleu
from .corpus import (
    CorpusSplit,
    SegmentDoc,
    Utterance,
    call_durations,
    load_corpus,
    load_segments,
    sample_split,
    segment_calls,
    write_segments,
    write_utterances,
)
from .degrade import NoiseSpec, degrade_corpus
from .demo import make_demo_calls, make_planted_docs, run_demo
from .errors import (
    AlignmentError,
    DataError,
    ModelError,
    ModelFormatError,
    ModelHashError,
    ModelVersionError,
    NumericalError,
    ParseError,
)
from .evaluate import (
    ConfusionMatrix,
    EvalReport,
    LabeledSet,
    accuracy,
    confusion,
    drift_timeline,
    eval_report,
    majority_baseline,
    prompt_histogram,
)
from .nmf import (
    NmfConfig,
    NmfResult,
    init_factors,
    nmf_train,
    nmf_transform,
    objective,
)
from .textprep import (
    TfidfMatrix,
    Vocabulary,
    build_vocabulary,
    load_vocabulary,
    save_vocabulary,
    tokenize,
    vectorize,
)
from .topics import (
    TopicModel,
    TopicSummary,
    assign_labels,
    load_model,
    save_model,
    top_terms,
)

__version__ = "0.1.0"
