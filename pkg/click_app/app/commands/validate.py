import logging

import click

from src.usecases.validation_usecase import ValidationUseCase

logger = logging.getLogger(__name__)

# Initialize services (singleton pattern)
_validation_use_case = None


def get_services() -> ValidationUseCase:
    """Initialize and return the validation use case."""
    global _validation_use_case
    if _validation_use_case is None:
        _validation_use_case = ValidationUseCase()
    return _validation_use_case


def report_validation(seed: int) -> int:
    """Run the property suites, print one line per property, return the exit code."""
    report = get_services().validate_suite(seed)
    for verdict in report.verdicts:
        status = "PASS" if verdict.passed else "FAIL"
        click.echo(f"{status}  {verdict.name:<30} {verdict.wall_time_ms:9.1f} ms  {verdict.detail}")
    if report.passed:
        click.echo(f"All {len(report.verdicts)} properties passed (seed {seed})")
        return 0
    click.echo(f"Failed: {', '.join(report.failed_names())}", err=True)
    return 1


@click.command("validate")
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def validate_command(ctx, seed):
    """Run the property suites; exit code 0 iff every property passes."""
    ctx.exit(report_validation(seed))
