"""
Setup configuration for Small-Fibre Maps
"""
from setuptools import setup, find_packages
from pathlib import Path

# Read README
readme_file = Path(__file__).parent / 'README.md'
long_description = readme_file.read_text(encoding='utf-8') if readme_file.exists() else ''

setup(
    name='small-fiber-maps',
    version='0.1.0',
    description='Build and audit maps from S^n to R^q whose fibres have small volume',
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['tests', 'tests.*']),
    python_requires='>=3.9',
    install_requires=[
        'pyyaml>=6.0',
        'python-dotenv>=1.0.0',
        'jinja2>=3.1.2',
        'networkx>=3.1',
        'matplotlib>=3.7.1',
        'pandas>=2.0.0',
        'numpy>=1.24',
        'scipy>=1.10',
        'tomli>=2.0.1; python_version < "3.11"',
        'tomli-w>=1.0.0',
    ],
    extras_require={
        'dev': [
            'pytest>=7.0',
            'pytest-cov>=4.0',
            'hypothesis>=6.80',
            'black>=23.0',
            'flake8>=6.0',
            'mypy>=1.0',
        ]
    },
    entry_points={
        'console_scripts': [
            'smallfibers=src.cli.main:main',
        ],
    },
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],
)
