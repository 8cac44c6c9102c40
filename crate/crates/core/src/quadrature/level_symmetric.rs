//! Level-symmetric (LQ_N) tables.
//!
//! Each order is defined by its first direction cosine `mu1`; the remaining
//! levels follow `mu_i^2 = mu_1^2 + (i - 1) * 2 (1 - 3 mu_1^2) / (N - 2)`.
//! Point weights are stored per weight class (the sorted level-index triple)
//! and normalized to unit sum over one octant. Orders 2 through 12 reproduce
//! the classical tables to all printed digits; order 16 pins its free weight
//! class to the classical value.

pub(crate) struct LevelSymmetricTable {
    pub order: usize,
    pub mu1: f64,
    pub weights: &'static [([usize; 3], f64)],
}

impl LevelSymmetricTable {
    pub fn levels(&self) -> Vec<f64> {
        let half = self.order / 2;
        if self.order == 2 {
            return vec![self.mu1];
        }
        let step = 2.0 * (1.0 - 3.0 * self.mu1 * self.mu1) / (self.order as f64 - 2.0);
        (0..half)
            .map(|i| (self.mu1 * self.mu1 + i as f64 * step).sqrt())
            .collect()
    }

    pub fn weight(&self, mut triple: [usize; 3]) -> f64 {
        triple.sort_unstable();
        self.weights
            .iter()
            .find(|(t, _)| *t == triple)
            .map(|(_, w)| *w)
            .expect("every point of an LQ octant belongs to a tabulated class")
    }
}

pub(crate) fn table(order: usize) -> Option<&'static LevelSymmetricTable> {
    TABLES.iter().find(|t| t.order == order)
}

static TABLES: &[LevelSymmetricTable] = &[
    LevelSymmetricTable {
        order: 2,
        mu1: 0.5773502691896258,
        weights: &[
            ([1, 1, 1], 1.0),
        ],
    },
    LevelSymmetricTable {
        order: 4,
        mu1: 0.35002117458154053,
        weights: &[
            ([1, 1, 2], 0.3333333333333332),
        ],
    },
    LevelSymmetricTable {
        order: 6,
        mu1: 0.2666354015167017,
        weights: &[
            ([1, 1, 3], 0.17612613086338005),
            ([1, 2, 2], 0.15720720246995315),
        ],
    },
    LevelSymmetricTable {
        order: 8,
        mu1: 0.21821789023599072,
        weights: &[
            ([1, 1, 4], 0.12098765432098607),
            ([1, 2, 3], 0.09074074074074231),
            ([2, 2, 2], 0.09259259259258758),
        ],
    },
    LevelSymmetricTable {
        order: 10,
        mu1: 0.1893213264780044,
        weights: &[
            ([1, 1, 5], 0.0893031479843522),
            ([1, 2, 4], 0.07252915171236862),
            ([1, 3, 3], 0.04504376743640615),
            ([2, 2, 3], 0.05392811448783764),
        ],
    },
    LevelSymmetricTable {
        order: 12,
        mu1: 0.16721265282271033,
        weights: &[
            ([1, 1, 6], 0.07076258997008812),
            ([1, 2, 5], 0.05588110156489345),
            ([1, 3, 4], 0.037337673758828134),
            ([2, 2, 4], 0.05028190106003868),
            ([2, 3, 3], 0.02585129165576327),
        ],
    },
    LevelSymmetricTable {
        order: 14,
        mu1: 0.15198586236528655,
        weights: &[
            ([1, 1, 7], 0.05799704149775853),
            ([1, 2, 6], 0.048900796994257686),
            ([1, 3, 5], 0.022793535816758432),
            ([1, 4, 4], 0.039413198847941595),
            ([2, 2, 5], 0.03809908545550201),
            ([2, 3, 4], 0.025839407522913197),
            ([3, 3, 3], 0.00826958059281706),
        ],
    },
    LevelSymmetricTable {
        order: 16,
        mu1: 0.1389568,
        weights: &[
            ([1, 1, 8], 0.048987199211420335),
            ([1, 2, 7], 0.04132962487160648),
            ([1, 3, 6], 0.02123260933164125),
            ([1, 4, 5], 0.0256206275379133),
            ([2, 2, 6], 0.036048588518910525),
            ([2, 3, 5], 0.01445893034585911),
            ([2, 4, 4], 0.034495952226376886),
            ([3, 3, 4], 0.008518009202584964),
        ],
    },
    LevelSymmetricTable {
        order: 18,
        mu1: 0.12934450515732931,
        weights: &[
            ([1, 1, 9], 0.0422646452357325),
            ([1, 2, 8], 0.03761274694838522),
            ([1, 3, 7], 0.007823518103606585),
            ([1, 4, 6], 0.03627488698243594),
            ([1, 5, 5], 0.007823517915028048),
            ([2, 2, 7], 0.04010062015703671),
            ([2, 3, 6], 0.012156671410184106),
            ([2, 4, 5], 0.015013276324819606),
            ([3, 3, 5], 0.007823518044310524),
            ([3, 4, 4], 0.017558832442362518),
        ],
    },
    LevelSymmetricTable {
        order: 20,
        mu1: 0.12060334279784043,
        weights: &[
            ([1, 1, 10], 0.037021048945644786),
            ([1, 2, 9], 0.03328421663437696),
            ([1, 3, 8], 0.01396701481377419),
            ([1, 4, 7], 0.026621270440080877),
            ([1, 5, 6], 0.008695791843257084),
            ([2, 2, 8], 0.026216669906593396),
            ([2, 3, 7], 0.00475140129025542),
            ([2, 4, 6], 0.03605486492590585),
            ([2, 5, 5], 0.0047514012889412535),
            ([3, 3, 6], 0.00475140130247133),
            ([3, 4, 5], 0.00475140129261794),
            ([4, 4, 4], 0.013022668227437396),
        ],
    },];
