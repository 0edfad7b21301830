"""Setup configuration for the cqa-trees package."""

from setuptools import setup

if __name__ == '__main__':
    setup()
