import os
import sys
import logging

import click

# Add backend directory to Python path
backend_dir = os.path.abspath(os.path.join(os.path.dirname(__file__), '../..'))
if backend_dir not in sys.path:
    sys.path.insert(0, backend_dir)

logger = logging.getLogger(__name__)


def create_app():
    """Create the command group with every command registered."""

    @click.group(help="Linear contrastive learning lab: sweeps and property suites.")
    def app():
        pass

    from click_app.app.commands.experiment import run_command
    from click_app.app.commands.validate import validate_command
    app.add_command(run_command)
    app.add_command(validate_command)

    logger.debug("Command group initialized")
    return app
