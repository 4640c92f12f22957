from .features import LangResources, extract_token_features, BOS, EOS
from .crf import (
    TAGS, TAG_TE, TAG_EN, TAG_OTHER,
    CrfModel, CrfTrainConfig, TaggedSentence,
    crf_log_likelihood_grad, train_crf, viterbi_decode,
    tag_song, tag_accuracy,
    read_tagged, write_tagged, save_model, load_model,
)

__all__ = [
    "LangResources", "extract_token_features", "BOS", "EOS",
    "TAGS", "TAG_TE", "TAG_EN", "TAG_OTHER",
    "CrfModel", "CrfTrainConfig", "TaggedSentence",
    "crf_log_likelihood_grad", "train_crf", "viterbi_decode",
    "tag_song", "tag_accuracy",
    "read_tagged", "write_tagged", "save_model", "load_model",
]
