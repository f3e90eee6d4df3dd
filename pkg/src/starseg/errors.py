"""Exception types raised by starseg.

Every error derives from :class:`StarsegError` (itself a ``ValueError``) so
callers can catch the whole family at once.
"""


class StarsegError(ValueError):
    pass


class InvalidImageError(StarsegError):
    """Image array has the wrong rank, zero size or non-finite values."""


class InvalidLevelError(StarsegError):
    """Decomposition level outside the valid range."""


class LevelTooLargeError(InvalidLevelError):
    """Requested depth needs more padding than the image can provide.

    Kept distinct from :class:`InvalidLevelError` so that callers such as
    level sweeps can cap the depth instead of failing.
    """

    def __init__(self, message, max_level):
        super().__init__(message)
        self.max_level = max_level


class PadExceedsImageError(StarsegError):
    pass


class InconsistentDecompositionError(StarsegError):
    pass


class InsufficientLevelsError(StarsegError):
    pass


class InconsistentInputError(StarsegError):
    pass


class EmptyInputError(StarsegError):
    pass


class PlacementFailedError(StarsegError):
    pass


class ImageParseError(StarsegError):
    """Raised when image bytes cannot be decoded.

    ``offset`` is the byte position where decoding failed, or ``None`` when
    it is not meaningful.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class UnsupportedFormatError(ImageParseError):
    pass


class MalformedHeaderError(ImageParseError):
    pass


class TruncatedPayloadError(ImageParseError):
    pass
