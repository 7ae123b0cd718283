from .diversity import (TOP_VERBS, CorefStats, VerbDiversity, VerbSource,
                        annotate_verbs, chain_names, coref_cluster_stats,
                        entity_name_diversity, story_verbs, top_verbs,
                        verb_diversity)
from .lcs import (DEFAULT_SHARD_SIZE, LcsStats, corpus_lcs_stats, lcs_length,
                  lcs_lengths, lcs_stats)
from .nll import stage_nll_report
from .ranking import (RANKING_SIZES, RankingAccuracy, RankingCase, Scorer,
                      entity_ranking, ranking_cases)
from .report import CorefRow, LcsRow, MetricsReport, RankingRow, VerbRow

__all__ = [
    'TOP_VERBS', 'CorefStats', 'VerbDiversity', 'VerbSource',
    'annotate_verbs', 'chain_names', 'coref_cluster_stats',
    'entity_name_diversity', 'story_verbs', 'top_verbs', 'verb_diversity',
    'DEFAULT_SHARD_SIZE', 'LcsStats', 'corpus_lcs_stats', 'lcs_length',
    'lcs_lengths', 'lcs_stats',
    'stage_nll_report',
    'RANKING_SIZES', 'RankingAccuracy', 'RankingCase', 'Scorer',
    'entity_ranking', 'ranking_cases',
    'CorefRow', 'LcsRow', 'MetricsReport', 'RankingRow', 'VerbRow',
]
