//! Runs each indicator-family case as its own test.

#[path = "support/big_m_cases.rs"]
mod cases;

#[test]
fn fixture_power_limit() {
    cases::fixture_power_limit();
}

#[test]
fn big_m_coefficients_are_the_power_limit() {
    cases::big_m_coefficients_are_the_power_limit();
}

#[test]
fn cable_power_used_direction_adds_attenuation() {
    cases::cable_power_used_direction_adds_attenuation();
}

#[test]
fn cable_power_unused_direction_is_zero_and_frees_sender() {
    cases::cable_power_unused_direction_is_zero_and_frees_sender();
}

#[test]
fn receiver_window_binds_only_for_opaque_receivers() {
    cases::receiver_window_binds_only_for_opaque_receivers();
}

#[test]
fn opaque_rx_is_the_and_of_reception_and_opacity() {
    cases::opaque_rx_is_the_and_of_reception_and_opacity();
}

#[test]
fn available_power_follows_device_kind() {
    cases::available_power_follows_device_kind();
}

#[test]
fn transmit_power_case_table() {
    cases::transmit_power_case_table();
}

#[test]
fn core_usage_needs_the_direction_allowed() {
    cases::core_usage_needs_the_direction_allowed();
}
