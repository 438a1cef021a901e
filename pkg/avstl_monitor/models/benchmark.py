from pydantic import Field

from .base import BaseModel

__all__ = ("BenchRow", "BenchReport")


class BenchRow(BaseModel):
    """Timing of one trace size.

    Attributes:
        ratio (float): Growth of the median time relative to the previous size,
            normalized to a doubling of the size. Absent for the first size.
    """

    size: int = Field(ge=1)
    median_seconds: float = Field(ge=0)
    ratio: float | None = None
    passed: bool = True


class BenchReport(BaseModel):
    formula: str
    repetitions: int
    rows: list[BenchRow] = []
    exponent: float | None = None

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def table(self) -> str:
        lines = [f"{'size':>10}  {'median (s)':>12}  {'ratio':>7}  status"]

        for row in self.rows:
            ratio = "-" if row.ratio is None else f"{row.ratio:.3f}"
            status = "ok" if row.passed else "FAIL"
            lines.append(f"{row.size:>10}  {row.median_seconds:>12.6f}  {ratio:>7}  {status}")

        if self.exponent is not None:
            lines.append(f"fitted exponent: {self.exponent:.3f}")

        return "\n".join(lines)
