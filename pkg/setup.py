from setuptools import setup, find_packages


setup(
    name='simplex_hoeffding',
    version='0.1.0',
    packages=find_packages(where='src'),
    package_dir={'': 'src'},
    install_requires=[
        'hydra-core==1.3.2',
        'numpy==1.24.2',
        'scipy==1.11.3',
        'tqdm==4.66.1',
        'wandb==0.15.12',
    ],
    extras_require={
        'test': ['pytest>=7.4'],
    },
    entry_points={
        'console_scripts': [
            'simplex-hoeffding=simplex_hoeffding.utils.cli:main',
        ],
    },
    description='Multivariate Chernoff-Hoeffding bounds for simplex-bounded random vectors and oracles to audit them.',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    python_requires='>=3.10',
)
