"""Exception types shared across the pipeline."""


class ParseError(ValueError):
    """Malformed input data; message names the offending line or row."""


class ConfigError(ValueError):
    """Invalid or incomplete configuration."""


class PipelineError(RuntimeError):
    """A pipeline stage failed; message is tagged with (stage, fold, subject)."""

    def __init__(self, stage, message, fold=None, subject=None):
        tag = stage if fold is None else f"{stage}:fold{fold}"
        if subject is not None:
            tag = f"{tag}:{subject}"
        super().__init__(f"[{tag}] {message}")
        self.stage = stage
        self.fold = fold
        self.subject = subject
