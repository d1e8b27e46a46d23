"""reviewforge: silver-standard opinion-summarization data from review corpora.

Reviews are split into clause-level propositions, cross-review agreement is
measured with textual entailment, the highest-consensus propositions become
a silver summary, and a provenance-free sample of the remaining reviews
becomes the source side of a training pair.
"""

from .consensus import ScoredProposition, SilverSummary, overlap, polish, score_item, select_summary
from .corpus import GoldEvalItem, Item, Review, SilverRecord, load_corpus, load_gold, load_silver, write_silver
from .entailment import (
    BackendConfig,
    EntailmentJudge,
    EntailmentPair,
    EntailmentVerdict,
    judge_batch,
    lexical_entails,
)
from .evalkit import RougeScore, SplitSpec, evaluate_file, make_split, rouge
from .pipeline import RunConfig, RunStats, emit_training_examples, run
from .propositions import Proposition, Sentence, extract_all, split_propositions, split_sentences
from .sampler import SampleConfig, SourceSet, remove_provenance, sample_sources

__version__ = "0.1.0"

__all__ = [
    "BackendConfig",
    "EntailmentJudge",
    "EntailmentPair",
    "EntailmentVerdict",
    "GoldEvalItem",
    "Item",
    "Proposition",
    "Review",
    "RougeScore",
    "RunConfig",
    "RunStats",
    "SampleConfig",
    "ScoredProposition",
    "Sentence",
    "SilverRecord",
    "SilverSummary",
    "SourceSet",
    "SplitSpec",
    "emit_training_examples",
    "evaluate_file",
    "extract_all",
    "judge_batch",
    "lexical_entails",
    "load_corpus",
    "load_gold",
    "load_silver",
    "make_split",
    "overlap",
    "polish",
    "remove_provenance",
    "rouge",
    "run",
    "sample_sources",
    "score_item",
    "select_summary",
    "split_propositions",
    "split_sentences",
    "write_silver",
]
