# Copyright 2020 BULL SAS All rights reserved
"""Command line application of renewal-kit."""
