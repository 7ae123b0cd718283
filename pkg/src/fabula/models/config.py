from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..corpus import TokenScheme, Vocabulary


class Seq2SeqConfig(BaseModel):
    """Shape of one convolutional encoder-decoder.

    `verb_head` names the decoder self-attention head restricted to
    previously generated verbs; `pointer_head` the head whose attention
    row selects the placeholder to copy.
    """

    model_config = ConfigDict(extra="forbid")

    source_vocab_size: int = Field(..., gt=0)
    target_vocab_size: int = Field(..., gt=0)
    pad_id: int = 0
    bos_id: int = 2
    eos_id: int = 3
    frame_id: Optional[int] = None
    placeholder_ids: list[int] = Field(default_factory=list)

    encoder_layers: int = Field(2, ge=1)
    decoder_layers: int = Field(4, ge=1)
    dim: int = Field(128, gt=0)
    heads: int = Field(4, gt=0)
    kernel_width: int = Field(3, gt=0)
    max_positions: int = Field(2048, gt=0)

    verb_head: Optional[int] = None
    pointer_head: Optional[int] = None
    copy_threshold: float = Field(0.5, ge=0.0, le=1.0)
    target_scheme: TokenScheme = TokenScheme.WORD

    @model_validator(mode="after")
    def _check_shape(self) -> "Seq2SeqConfig":
        if self.dim % self.heads:
            raise ValueError(f"{self.heads} heads do not divide model dimension {self.dim}")
        if self.kernel_width % 2 == 0:
            raise ValueError("kernel width must be odd")
        special = [h for h in (self.verb_head, self.pointer_head) if h is not None]
        if len(special) != len(set(special)):
            raise ValueError("verb and pointer heads must be distinct")
        if any(not 0 <= h < self.heads for h in special):
            raise ValueError(f"special heads must lie in [0, {self.heads})")
        if self.verb_head is not None and self.frame_id is None:
            raise ValueError("a verb head needs the frame delimiter id")
        if self.pointer_head is not None and not self.placeholder_ids:
            raise ValueError("a pointer head needs the placeholder ids")
        return self

    @classmethod
    def for_vocabularies(
        cls,
        source: Vocabulary,
        target: Vocabulary,
        verb_head: bool = False,
        pointer_head: bool = False,
        **overrides,
    ) -> "Seq2SeqConfig":
        """Config whose special ids come from the target vocabulary.

        Head 0 becomes the verb head and the next free head the pointer head.
        """
        heads = [0, 1] if verb_head else [0]
        return cls(
            source_vocab_size=len(source),
            target_vocab_size=len(target),
            pad_id=target.pad_id,
            bos_id=target.bos_id,
            eos_id=target.eos_id,
            frame_id=target.frame_id if verb_head else None,
            placeholder_ids=sorted(target.placeholder_ids) if pointer_head else [],
            verb_head=0 if verb_head else None,
            pointer_head=heads[-1] if pointer_head else None,
            target_scheme=target.scheme,
            **overrides,
        )
