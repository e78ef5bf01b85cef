from setuptools import setup, find_packages

import os.path as osp


setup(
    name='swe_symmetry',
    version='0.1.0',
    description='Lie point symmetries and similarity reductions of rotating shallow-water systems',
    packages=find_packages(include=['swe_symmetry', 'swe_symmetry.*']),
    python_requires='>=3.8',
    install_requires=[
        'sympy>=1.9',
        'numpy',
        'scipy',
        'torch',
        'tqdm',
        'tensorboard',
        'pyyaml',
    ],
    extras_require={
        'vis': ['matplotlib'],
        'test': ['pytest'],
    },
    data_files=[('fixtures', [osp.join('fixtures', f) for f in [
        'table1.json', 'table2.json', 'table3.json', 'table4.json',
        'table5.json', 'table6.json', 'table6b.json',
        'optimal_systems.json', 'reductions.json', 'figure_ics.json']])],
    entry_points={
        'console_scripts': ['swe-symmetry = swe_symmetry.cli:main'],
    },
)
