//! Column layout of an NSL-KDD record.

/// Number of comma-separated fields in one record: 41 features, label, difficulty.
pub const FIELD_COUNT: usize = 43;

/// Number of connection features (everything before the label).
pub const FEATURE_COUNT: usize = 41;

pub const LABEL_COLUMN: usize = 41;
pub const DIFFICULTY_COLUMN: usize = 42;

/// Label used by the dataset for normal traffic.
pub const NORMAL_LABEL: &str = "normal";

/// Feature names in file order.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
];

/// Feature columns holding tokens rather than numbers.
pub const CATEGORICAL_COLUMNS: [usize; 3] = [1, 2, 3];

pub const NUMERIC_COUNT: usize = FEATURE_COUNT - CATEGORICAL_COLUMNS.len();

/// Feature column indices of the numeric fields, in file order.
pub const NUMERIC_COLUMNS: [usize; NUMERIC_COUNT] = {
    let mut cols = [0usize; NUMERIC_COUNT];
    let mut next = 0;
    let mut col = 0;
    while col < FEATURE_COUNT {
        if col < 1 || col > 3 {
            cols[next] = col;
            next += 1;
        }
        col += 1;
    }
    cols
};

pub fn is_categorical(column: usize) -> bool {
    CATEGORICAL_COLUMNS.contains(&column)
}
