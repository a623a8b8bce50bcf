from submonoid_analysis.parsers.automaton import AutomatonParser
from submonoid_analysis.parsers.morphism import MorphismParser
from submonoid_analysis.parsers.reduction_map import ReductionMapParser
from submonoid_analysis.parsers.word_set import WordSetParser

__all__ = ["AutomatonParser", "MorphismParser", "ReductionMapParser", "WordSetParser"]
