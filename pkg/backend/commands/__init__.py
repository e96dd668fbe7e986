from commands.bench import bench  # noqa: F401
from commands.embeddings import export_embeddings  # noqa: F401
from commands.features import extract_features, train_ae  # noqa: F401
from commands.synth import synth  # noqa: F401
from commands.tokenize_text import tokenize  # noqa: F401
from commands.toy import gen_toy  # noqa: F401
from commands.train import train  # noqa: F401
