"""Published MNLI matched-dev accuracies for well-known public classifiers.

These are the figures reported by the models' own papers or model cards;
``/v1/info`` serves them as recorded metadata for the configured checkpoint.
An explicit ``mnli_dev_accuracy`` in the service config always wins, e.g.
for private or newly finetuned checkpoints.
"""

KNOWN_MNLI_ACCURACY: dict[str, float] = {
    "roberta-large-mnli": 0.902,
    "facebook/bart-large-mnli": 0.899,
    "microsoft/deberta-large-mnli": 0.913,
    "typeform/distilbert-base-uncased-mnli": 0.820,
}


def known_accuracy(model: str) -> float | None:
    return KNOWN_MNLI_ACCURACY.get(model)
