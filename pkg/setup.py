from setuptools import setup, find_packages

with open('requirements.txt') as f:
    requirements = [line.split('#')[0].strip() for line in f.read().splitlines()
                    if line.strip() and not line.startswith('#')]

setup(
    name="spin-squeezing",
    version="0.1.0",
    package_dir={'': 'src'},
    packages=find_packages(where='src'),
    install_requires=[r for r in requirements if not r.startswith('pytest')],
    extras_require={
        'test': [r for r in requirements if r.startswith('pytest')],
    },
    include_package_data=True,
    python_requires='>=3.10',

    # Metadatos
    description="Detección de entrelazamiento con desigualdades de compresión de espín",
    long_description=open('README.md', encoding='utf-8').read(),
    long_description_content_type='text/markdown',

    # Clasificadores
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Physics',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],

    # Puntos de entrada para scripts de consola
    entry_points={
        'console_scripts': [
            'spinsq=spin_squeezing.main:main',
        ],
    },
)
