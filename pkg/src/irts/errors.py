"""Exception hierarchy shared across the package."""


class IrtsError(Exception):
    """Base class for all errors raised by this package."""


class DataError(IrtsError):
    """Malformed or inconsistent input data (bad cell, duplicate coordinate, ...)."""


class SchemaError(IrtsError):
    """Input file does not match the declared schema (e.g. missing column)."""


class NotFoundError(IrtsError, KeyError):
    """Lookup of a key that is not present (e.g. timestamp not in the index)."""

    def __str__(self) -> str:  # KeyError quotes its repr; keep the plain message
        return Exception.__str__(self)


class FormatError(IrtsError):
    """Persisted file violates the binary format (magic, version, section layout)."""


class IntegrityError(IrtsError):
    """Persisted file is structurally valid but its checksum does not match."""


class CapacityError(IrtsError):
    """A guarded allocation would exceed the configured cell budget."""

    def __init__(self, required_cells: int, max_cells: int):
        super().__init__(
            f"dense tensor needs {required_cells} cells, guard allows {max_cells}"
        )
        self.required_cells = required_cells
        self.max_cells = max_cells
