# -*- coding: utf-8 -*-
"""Multimodality testing for circular data with wrapped-normal kernel density estimates."""

__version__ = "0.1.0"
