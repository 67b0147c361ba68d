from .models import EPSILON, Ranking, SummaryInfo, SummaryTable
from .summarize_core import (
    UndoWitness, canonical_head, children, compute_mnt, compute_ranking, instantiate_summary, may_undone,
    may_undone_witness, must_undone, occurrence_summaries, post, summ, summ_event, summ_plan, summ_rule,
)
