import json
import os

import pytest
import torch
from transformers import AutoTokenizer, BertConfig, BertForMaskedLM

os.environ.setdefault("TRANSFORMERS_VERBOSITY", "error")

# Tiny cased vocabulary: specials, punctuation, ten rare words the smoke
# sentences treat as complex, everyday filler words, two subword pieces.
RARE_WORDS = [
    "müşkül", "beyhude", "nadide", "müphem", "çetrefil",
    "kadim", "müstesna", "mütebessim", "muazzam", "berceste",
]
COMMON_WORDS = [
    "bir", "bu", "o", "ev", "gün", "hava", "zor", "kolay", "güzel", "büyük",
    "küçük", "eski", "yeni", "iyi", "kötü", "uzun", "kısa", "sıcak", "soğuk",
    "açık", "kapalı", "dolu", "boş", "hızlı", "yavaş", "durum", "mesele",
    "insan", "kitap", "yol", "su", "kapı", "pencere", "bahçe", "sabah", "akşam",
]
VOCAB = (
    ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "."]
    + RARE_WORDS
    + COMMON_WORDS
    + ["##lik", "##ler"]
)


def build_tiny_model(target_dir) -> str:
    """Write a deterministic, randomly initialised cased BERT to ``target_dir``."""
    target = str(target_dir)
    os.makedirs(target, exist_ok=True)
    with open(os.path.join(target, "vocab.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(VOCAB) + "\n")
    with open(os.path.join(target, "tokenizer_config.json"), "w", encoding="utf-8") as fh:
        json.dump(
            {"tokenizer_class": "BertTokenizer", "do_lower_case": False, "strip_accents": False},
            fh,
        )
    tokenizer = AutoTokenizer.from_pretrained(target)
    tokenizer.save_pretrained(target)
    torch.manual_seed(12345)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    model = BertForMaskedLM(config)
    model.eval()
    model.save_pretrained(target)
    return target


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    return build_tiny_model(tmp_path_factory.mktemp("tiny-turkish-bert"))
