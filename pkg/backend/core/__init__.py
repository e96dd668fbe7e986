from core.tokenizer import Tokenizer, get_tokenizer  # noqa: F401
from core.trainer import train  # noqa: F401
from core.synthesis import Synthesizer, synthesize_to_file  # noqa: F401
