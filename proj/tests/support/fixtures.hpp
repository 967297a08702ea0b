#pragma once

#include "xjoin/query.hpp"
#include "xjoin/warehouse.hpp"

namespace xjoin::testing {

inline FactCell cell(double quantity, std::vector<DimensionRef> refs) {
  return FactCell{{make_measure("quantity", quantity)}, std::move(refs)};
}

/// customers/c1 in Lyon with quantity 3, customers/c2 in Paris with quantity 5.
inline Warehouse two_cell_warehouse() {
  Warehouse w;
  w.dimensions.push_back(Dimension{"customers",
                                   {DimensionNode{"c1", {{"cust_city", "Lyon"}}},
                                    DimensionNode{"c2", {{"cust_city", "Paris"}}}}});
  w.cells.push_back(cell(3, {{"customers", "c1"}}));
  w.cells.push_back(cell(5, {{"customers", "c2"}}));
  return w;
}

/// Sales-shaped fixture: two Lyon customers sharing a postal code, one Paris customer.
inline Warehouse lyon_customers_warehouse() {
  Warehouse w;
  w.dimensions.push_back(Dimension{
      "customers",
      {DimensionNode{"c1", {{"cust_city", "Lyon"}, {"cust_first_name", "Marie"}, {"cust_postal_code", "69001"}}},
       DimensionNode{"c2", {{"cust_city", "Lyon"}, {"cust_first_name", "Jean"}, {"cust_postal_code", "69001"}}},
       DimensionNode{"c3", {{"cust_city", "Paris"}, {"cust_first_name", "Paul"}, {"cust_postal_code", "75001"}}}}});
  w.dimensions.push_back(Dimension{"products", {DimensionNode{"p1", {{"prod_name", "Tea"}}}}});
  w.cells.push_back(cell(3, {{"customers", "c1"}, {"products", "p1"}}));
  w.cells.push_back(cell(5, {{"customers", "c2"}, {"products", "p1"}}));
  w.cells.push_back(cell(7, {{"customers", "c3"}, {"products", "p1"}}));
  w.cells.push_back(cell(2, {{"customers", "c1"}, {"products", "p1"}}));
  return w;
}

inline Query lyon_sum_query() {
  Query q;
  q.predicates.push_back(Predicate{"customers", "cust_city", "Lyon"});
  q.aggregate = Aggregate::Sum;
  q.measureId = "quantity";
  return q;
}

/// The decisional query grouping Lyon customers by first name and postal code.
inline Query lyon_grouped_query() {
  Query q = lyon_sum_query();
  q.groupBy = {GroupKeyRef{"customers", "cust_first_name"}, GroupKeyRef{"customers", "cust_postal_code"}};
  return q;
}

}  // namespace xjoin::testing
