"""Skip-gram, association and reduction tools for symbolic harmony corpora."""
from .corpus import (
    AnnotationError, CorpusError, CoverageError, KeySegment, Movement, NoteEvent, ParseError, Slice,
    full_expansion, load_corpus, parse_movement,
)
from .encoding import (
    CapacityError, ChordEvent, Csdc, build_csdc, csdc_vocabulary_bound, encode_movement, map_to_csd,
    parse_csdc, unigram_distribution,
)
from .ngrams import (
    CountTable, combination_bound, count_contiguous, count_skipgrams, enumerate_skipgrams, skip_count_vectors,
)
from .ranking import CubicFit, ExclusionReport, exclusion_flags, fit_cubic, rank_by_beta3, rank_by_count
from .association import AttractorStats, ContingencyTable, asym, attractor_table, contingency, fisher_exact
from .reduction import ForceRanking, ReductionTree, export_tree, reduce, reduction_level

__version__ = "0.1.0"
