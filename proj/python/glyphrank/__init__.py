"""Zero-shot ideographic character retrieval: IDS parsing, masked local
similarity, contrastive loss reference values and coarse-to-fine ranking."""

from ._core import (
    BatchSample,
    Candidate,
    CandidateIndex,
    CurriculumSchedule,
    GlyphrankError,
    IdsSequence,
    IdsToken,
    QuerySample,
    RankedEntry,
    RankingResult,
    SweepRow,
    TokenKind,
    ValidationReport,
    classify_token,
    cosine,
    fuse,
    global_loss,
    infer,
    infer_exhaustive,
    lambda1,
    lambda2,
    load_index,
    load_queries,
    local_loss,
    normalize_topk,
    parse_ids,
    recall_at_k,
    response_map,
    s_i2t,
    s_t2i,
    save_index,
    save_queries,
    select_topk,
    sweep_k,
    synth_generate,
    top1_accuracy,
    total_loss,
    validate_ids,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
