"""Exception hierarchy shared by all pipeline stages.

The CLI maps these onto exit codes: usage/config problems exit 1, bad or
missing data exits 2, unreachable providers exit 3.
"""


class LabelBridgeError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(LabelBridgeError):
    """Invalid configuration or command usage.

    ``problems`` carries every validation failure found, not just the first.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class DataError(LabelBridgeError):
    """Malformed, inconsistent, or missing input data."""


class MissingArtifactError(DataError):
    """An upstream stage artifact is absent.

    Names the subcommand that produces it so the message is actionable.
    """

    def __init__(self, path, producer):
        self.path = path
        self.producer = producer
        super().__init__(
            f"missing artifact {path}: run the '{producer}' subcommand first"
        )


class ProviderUnavailableError(LabelBridgeError):
    """An external provider (embeddings or language-id) cannot be reached.

    Retryable: the request may succeed once the provider is back up.
    """


class DegenerateEmbeddingError(DataError):
    """A provider returned a zero-norm vector, so no similarity is defined."""
