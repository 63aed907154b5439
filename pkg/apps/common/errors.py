"""Exceptions raised across the codec apps."""


class CodecError(Exception):
    """Base class for every codec failure."""


# frames


class BadDimensions(CodecError, ValueError):
    pass


class TruncatedStream(CodecError, ValueError):
    pass


class DimensionMismatch(CodecError, ValueError):
    pass


# splitter


class BadBlockSize(CodecError, ValueError):
    pass


class EmptySequence(CodecError, ValueError):
    pass


# transform and quantizer


class InconsistentBands(CodecError, ValueError):
    pass


class BadLevels(CodecError, ValueError):
    pass


class BinOutOfRange(CodecError, ValueError):
    pass


class InconsistentPlaneCount(CodecError, ValueError):
    pass


# ldpca


class LengthMismatch(CodecError, ValueError):
    pass


class ConstructionFailed(CodecError):
    """No full-rank syndrome former was found within the reseed budget."""


# soft input


class MissingPlane(CodecError, ValueError):
    pass


class WrongBand(CodecError, ValueError):
    pass


class WrongPlane(CodecError, ValueError):
    pass


# key frames


class CorruptPayload(CodecError):
    pass


class UnknownCodec(CodecError, LookupError):
    pass


# pipeline


class MalformedBitstream(CodecError):
    pass
