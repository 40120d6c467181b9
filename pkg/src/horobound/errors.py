"""Error type shared by every module; ``code`` carries the stable error name."""


class GeometryError(Exception):
    """Raised when an input or request violates a module contract.

    ``code`` is one of the documented names (``BAD_EDGE``, ``DISCONNECTED``,
    ``UNKNOWN_VERTEX`` ...) and is what the command line reports verbatim.
    """

    def __init__(self, code: str, detail: str = "", where: str | None = None):
        self.code = code
        self.detail = detail
        self.where = where
        msg = code if not detail else f"{code}: {detail}"
        if where:
            msg = f"{msg} ({where})"
        super().__init__(msg)
