"""Domain datasets: a design matrix paired with a response vector."""

from dataclasses import dataclass

import numpy as np

from .validation import (
    as_float_matrix,
    as_float_vector,
    check_finite_matrix,
    check_finite_vector,
)

TARGET = "target"
SOURCE = "source"
DOMAIN_TAGS = (TARGET, SOURCE)


@dataclass(frozen=True)
class Dataset:
    """One domain's regression data.

    ``design`` is n x d, ``response`` has length n.  Construction only coerces
    to float arrays; call :func:`validate_dataset` to enforce the invariants
    (matching row counts, all entries finite).
    """

    design: np.ndarray
    response: np.ndarray
    domain_tag: str = TARGET

    def __post_init__(self):
        object.__setattr__(self, "design", as_float_matrix(self.design, "design"))
        object.__setattr__(self, "response", as_float_vector(self.response, "response"))
        if self.domain_tag not in DOMAIN_TAGS:
            raise ValueError(f"domain_tag must be one of {DOMAIN_TAGS}, got {self.domain_tag!r}")

    @property
    def n(self) -> int:
        return self.design.shape[0]

    @property
    def dim(self) -> int:
        return self.design.shape[1]


def validate_dataset(ds: Dataset) -> None:
    """Check the Dataset invariants, raising ValueError naming the offender."""
    if ds.design.shape[0] != ds.response.shape[0]:
        raise ValueError(
            f"dimension mismatch: design has {ds.design.shape[0]} rows but "
            f"response has length {ds.response.shape[0]}"
        )
    check_finite_matrix(ds.design, "design")
    check_finite_vector(ds.response, "response")
