"""Exception hierarchy shared across the pipeline stages."""


class WikiciteError(Exception):
    """Base class for data errors raised by this package."""


class XmlError(WikiciteError, ValueError):
    """Malformed XML in a dump or lexicon file.

    ``offset`` is the byte offset (into the decompressed stream) at which the
    problem was detected, ``None`` when unknown.
    """

    def __init__(self, message, offset=None, page_title=None):
        self.offset = offset
        self.page_title = page_title
        parts = [message]
        if page_title:
            parts.append(f"in page {page_title!r}")
        if offset is not None:
            parts.append(f"near byte {offset}")
        super().__init__(", ".join(parts))


class DecompressionError(WikiciteError, OSError):
    """Corrupt or truncated bzip2 data; ``offset`` is into the compressed file."""

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (compressed byte {offset})"
        super().__init__(message)


class CollisionError(WikiciteError, ValueError):
    """Two canonical journal names claim the same normalized key."""

    def __init__(self, key, first, second):
        self.key = key
        self.canonicals = (first, second)
        super().__init__(f"lexicon key {key!r} maps to both {first!r} and {second!r}")


class NmfError(WikiciteError, ValueError):
    """Base for factorization errors. ``k`` is set when raised inside a sweep."""

    k = None


class EmptyMatrix(NmfError):
    pass


class RankTooLarge(NmfError):
    pass


class ShapeMismatch(NmfError):
    pass


class AxisMismatch(WikiciteError, ValueError):
    """Models compared by the cluster bush do not share an article axis."""


class NonConsecutiveK(WikiciteError, ValueError):
    pass
